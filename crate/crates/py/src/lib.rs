//! Python bindings. Row indices are 0-based, as in the Rust API; `+inf`
//! moduli come back as `float("inf")`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use linstab::{
    corpus, EstimatorConfig, LinearSystem, Mode, ModulusReport, Norm, SetWitness, Tolerances, VertexSet,
};

create_exception!(linstab_py, LinstabError, PyException);

fn err(e: linstab::Error) -> PyErr {
    LinstabError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

fn tolerances(overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Tolerances> {
    let mut t = Tolerances::default();
    if let Some(d) = overrides {
        for (k, v) in d.iter() {
            let key: String = k.extract()?;
            let v: f64 = v.extract()?;
            match key.as_str() {
                "feas_tol" => t.feas_tol = v,
                "active_tol" => t.active_tol = v,
                "strict_tol" => t.strict_tol = v,
                "dedupe_tol" => t.dedupe_tol = v,
                "conv_tol" => t.conv_tol = v,
                other => return Err(PyValueError::new_err(format!("unknown tolerance `{other}`"))),
            }
        }
    }
    t.validate().map_err(err)?;
    Ok(t)
}

fn sets<'py>(py: Python<'py>, sets: &[SetWitness]) -> PyResult<Vec<Bound<'py, PyDict>>> {
    sets.iter()
        .map(|w| {
            let d = PyDict::new(py);
            d.set_item("indices", w.indices.clone())?;
            d.set_item("direction", w.direction.clone())?;
            d.set_item("hull_distance", w.hull_distance)?;
            Ok(d)
        })
        .collect()
}

fn report<'py>(py: Python<'py>, r: &ModulusReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", r.value.value())?;
    d.set_item("case", r.case_tag.to_string())?;
    d.set_item("mode", format!("{:?}", r.mode).to_lowercase())?;
    let mut witnesses = Vec::new();
    for w in &r.witnesses {
        let e = PyDict::new(py);
        e.set_item("point", w.point.clone())?;
        e.set_item("active", w.active.indices().to_vec())?;
        e.set_item("sets", sets(py, &w.sets)?)?;
        witnesses.push(e);
    }
    d.set_item("witnesses", witnesses)?;
    Ok(d)
}

fn vertex_list(v: &VertexSet) -> Vec<(Vec<f64>, Vec<usize>)> {
    v.iter().map(|(p, a)| (p.clone(), a.indices().to_vec())).collect()
}

fn point_refs(points: &[Vec<f64>]) -> Vec<&[f64]> {
    points.iter().map(|p| p.as_slice()).collect()
}

/// A linear inequality system `Ax <= b` with the norm used on `R^n`.
#[pyclass(module = "linstab_py", frozen)]
struct System {
    inner: LinearSystem,
    tol: Tolerances,
}

#[pymethods]
impl System {
    #[new]
    #[pyo3(signature = (rows, rhs, norm = "l2", tolerances = None))]
    fn new(rows: Vec<Vec<f64>>, rhs: Vec<f64>, norm: &str, tolerances: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let norm: Norm = parse(norm)?;
        Ok(System {
            inner: LinearSystem::new(rows, rhs, norm).map_err(err)?,
            tol: self::tolerances(tolerances)?,
        })
    }

    /// One of the reference systems: example1_r3, example1_limit,
    /// example2_r3, example2_limit, strip, half_line, full_space.
    #[staticmethod]
    fn reference(name: &str) -> PyResult<Self> {
        let inner = corpus::all()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| PyValueError::new_err(format!("no reference system named `{name}`")))?;
        Ok(System {
            inner,
            tol: Tolerances::default(),
        })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn norm(&self) -> &'static str {
        self.inner.norm().name()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows().to_vec()
    }

    #[getter]
    fn rhs(&self) -> Vec<f64> {
        self.inner.rhs().to_vec()
    }

    fn scaled(&self, factor: f64) -> PyResult<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(PyValueError::new_err("scale factor must be positive and finite"));
        }
        Ok(System {
            inner: self.inner.scaled(factor),
            tol: self.tol,
        })
    }

    fn is_feasible(&self) -> PyResult<bool> {
        linstab::is_feasible(&self.inner, &self.tol).map_err(err)
    }

    fn is_bounded(&self) -> PyResult<bool> {
        linstab::is_bounded(&self.inner, &self.tol).map_err(err)
    }

    fn is_full_space(&self) -> bool {
        linstab::is_full_space(&self.inner, &self.tol)
    }

    fn active_set(&self, x: Vec<f64>) -> PyResult<Vec<usize>> {
        Ok(linstab::active_set(&self.inner, &x, &self.tol).map_err(err)?.indices().to_vec())
    }

    /// `(point, active rows)` for every extreme point; with `restricted`, the
    /// extreme points of the intersection with the row space.
    #[pyo3(signature = (restricted = false))]
    fn vertices(&self, restricted: bool) -> PyResult<Vec<(Vec<f64>, Vec<usize>)>> {
        let v = if restricted {
            linstab::restricted_vertices(&self.inner, &self.tol)
        } else {
            linstab::vertices(&self.inner, &self.tol)
        };
        Ok(vertex_list(&v.map_err(err)?))
    }

    fn d_family(&self, x: Vec<f64>) -> PyResult<Vec<(Vec<usize>, Vec<f64>)>> {
        let f = linstab::d_family(&self.inner, &x, &self.tol).map_err(err)?;
        Ok(f.sets.into_iter().map(|m| (m.indices, m.direction)).collect())
    }

    fn clm_rhs(&self, x: Vec<f64>) -> PyResult<f64> {
        Ok(linstab::clm_rhs(&self.inner, &x, &self.tol).map_err(err)?.value.value())
    }

    fn clm_full(&self, x: Vec<f64>) -> PyResult<f64> {
        Ok(linstab::clm_full(&self.inner, &x, &self.tol).map_err(err)?.value.value())
    }

    /// Calmness modulus with its active set and maximizing index sets.
    #[pyo3(signature = (x, mode = "rhs"))]
    fn clm<'py>(&self, py: Python<'py>, x: Vec<f64>, mode: &str) -> PyResult<Bound<'py, PyDict>> {
        let c = linstab::clm(&self.inner, &x, parse(mode)?, &self.tol).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("value", c.value.value())?;
        d.set_item("active", c.active.indices().to_vec())?;
        d.set_item("witnesses", sets(py, &c.witnesses)?)?;
        Ok(d)
    }

    fn lipusc_rhs<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        report(py, &linstab::lipusc_rhs(&self.inner, &self.tol).map_err(err)?)
    }

    fn lipusc_full<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        report(py, &linstab::lipusc_full(&self.inner, &self.tol).map_err(err)?)
    }

    fn distance(&self, x: Vec<f64>) -> PyResult<f64> {
        linstab::point_to_polyhedron_distance(&self.inner, &x, &self.tol).map_err(err)
    }

    /// Sampling estimate of the Lipschitz upper semicontinuity modulus.
    #[pyo3(signature = (mode = "full", samples = 100_000, delta = 1e-3, seed = 0, targeted = true, box_radius = None))]
    #[allow(clippy::too_many_arguments)]
    fn estimate<'py>(
        &self,
        py: Python<'py>,
        mode: &str,
        samples: usize,
        delta: f64,
        seed: u64,
        targeted: bool,
        box_radius: Option<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mode: Mode = parse(mode)?;
        let cfg = EstimatorConfig {
            samples,
            delta,
            seed,
            box_radius,
            targeted,
        };
        let r = py
            .detach(|| linstab::estimate_lipusc(&self.inner, &cfg, mode, &self.tol))
            .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("estimate", r.estimate)?;
        d.set_item("best_x", r.best_x)?;
        d.set_item("residual", r.residual)?;
        d.set_item("distance", r.distance)?;
        d.set_item("norm", r.norm)?;
        d.set_item("delta", r.delta_used)?;
        d.set_item("box_radius", r.box_radius)?;
        d.set_item("valid_samples", r.valid_samples)?;
        d.set_item("drawn", r.drawn)?;
        Ok(d)
    }

    /// Whether `clm_rhs` is constant on the relative interior of a face and
    /// no smaller at its extreme points.
    #[pyo3(signature = (face, probes = 10, seed = 0))]
    fn face_constancy<'py>(
        &self,
        py: Python<'py>,
        face: Vec<usize>,
        probes: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = linstab::face_constancy_check(&self.inner, &face, probes, seed, &self.tol).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("holds", r.holds)?;
        d.set_item("interior_min", r.interior_min)?;
        d.set_item("interior_max", r.interior_max)?;
        d.set_item("vertex_values", r.vertex_values)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("System(m={}, n={}, norm={})", self.inner.m(), self.inner.n(), self.inner.norm())
    }
}

/// `(distance, nearest point)` from the origin to the hull, in the dual norm.
#[pyfunction]
#[pyo3(signature = (points, norm = "l2"))]
fn min_norm_point(points: Vec<Vec<f64>>, norm: &str) -> PyResult<(f64, Option<Vec<f64>>)> {
    let h = linstab::min_norm_point(&point_refs(&points), parse(norm)?, &Tolerances::default()).map_err(err)?;
    Ok((h.distance.value(), h.witness))
}

#[pyfunction]
#[pyo3(signature = (points, norm = "l2"))]
fn end_set_distance(points: Vec<Vec<f64>>, norm: &str) -> PyResult<(f64, Option<Vec<f64>>)> {
    let e = linstab::end_set_distance(&point_refs(&points), parse(norm)?, &Tolerances::default()).map_err(err)?;
    Ok((e.distance.value(), e.witness))
}

#[pyfunction]
#[pyo3(signature = (points, norm = "l2", samples = 100_000, seed = 0))]
fn end_set_distance_oracle(py: Python<'_>, points: Vec<Vec<f64>>, norm: &str, samples: usize, seed: u64) -> PyResult<f64> {
    let norm: Norm = parse(norm)?;
    py.detach(|| linstab::end_set_distance_oracle(&point_refs(&points), norm, samples, seed, &Tolerances::default()))
        .map_err(err)
}

#[pymodule]
fn linstab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_function(wrap_pyfunction!(min_norm_point, m)?)?;
    m.add_function(wrap_pyfunction!(end_set_distance, m)?)?;
    m.add_function(wrap_pyfunction!(end_set_distance_oracle, m)?)?;
    m.add("LinstabError", m.py().get_type::<LinstabError>())?;
    Ok(())
}
