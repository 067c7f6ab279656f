//! Monte-Carlo estimation of the Lipschitz upper semicontinuity moduli from
//! the residual-ratio characterisation
//!
//! ```text
//! sup { (||x|| + 1) dist(x, F) / ||(Ax - b)_+||_inf : ||(Ax - b)_+||_inf <= delta (||x|| + 1) }
//! ```
//!
//! (without the `||x|| + 1` factor in rhs mode), plus an empirical check that
//! `clm_rhs` is constant on the relative interior of a face.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::point_to_polyhedron_distance;
use crate::lp::{lp_solve, LpProblem, LpStatus};
use crate::model::{vector_norm, LinearSystem, Norm, Tolerances};
use crate::moduli::{clm_rhs, lipusc, CaseTag, Mode, ModulusReport};
use crate::polyhedron::{face_system, is_feasible, restricted_vertices, vertices, ActiveIndexSet};

/// Samples per independently seeded chunk.
pub const SAMPLE_CHUNK: usize = 2048;
/// Exponents `k` of the targeted cloud radii `10^-k`.
pub const TARGET_RADII: std::ops::RangeInclusive<i32> = 1..=6;

const TARGET_STREAM_BASE: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub samples: usize,
    pub delta: f64,
    pub seed: u64,
    /// Half-width of the uniform sampling box around the origin; defaults to
    /// `2 (1 + max ||v||)` over the extreme points used by the closed form.
    pub box_radius: Option<f64>,
    pub targeted: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            samples: 100_000,
            delta: 1e-3,
            seed: 0,
            box_radius: None,
            targeted: true,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::DegenerateInput(
                "estimator needs at least one sample",
            ));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::DegenerateInput("delta must be positive and finite"));
        }
        if let Some(r) = self.box_radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::DegenerateInput(
                    "box radius must be positive and finite",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mode: Mode,
    pub estimate: f64,
    /// `None` when no sample passed the residual filter.
    pub best_x: Option<Vec<f64>>,
    /// `||(A best_x - b)_+||_inf`.
    pub residual: f64,
    /// `dist(best_x, F)`.
    pub distance: f64,
    /// `||best_x||`.
    pub norm: f64,
    pub delta_used: f64,
    pub box_radius: f64,
    pub valid_samples: usize,
    pub drawn: usize,
}

impl EstimateReport {
    /// The ratio recomputed from the stored terms.
    pub fn recomputed(&self) -> f64 {
        if self.best_x.is_none() {
            return 0.0;
        }
        let scale = match self.mode {
            Mode::Rhs => 1.0,
            Mode::Full => self.norm + 1.0,
        };
        scale * self.distance / self.residual
    }
}

#[derive(Debug, Clone)]
struct Best {
    ratio: f64,
    x: Vec<f64>,
    residual: f64,
    distance: f64,
    norm: f64,
}

#[derive(Debug, Clone, Default)]
struct ChunkResult {
    best: Option<Best>,
    valid: usize,
    drawn: usize,
}

impl ChunkResult {
    fn merge(mut self, other: ChunkResult) -> ChunkResult {
        self.valid += other.valid;
        self.drawn += other.drawn;
        if let Some(b) = other.best {
            if self.best.as_ref().is_none_or(|cur| b.ratio > cur.ratio) {
                self.best = Some(b);
            }
        }
        self
    }
}

/// One targeted cloud: Gaussian samples of standard deviation `radius`
/// around `center`.
#[derive(Debug, Clone)]
struct Cloud {
    center: Vec<f64>,
    radius: f64,
    count: usize,
}

enum Source<'a> {
    Uniform(f64),
    Cloud(&'a Cloud),
}

struct Evaluator<'a> {
    sys: &'a LinearSystem,
    mode: Mode,
    delta: f64,
    tol: &'a Tolerances,
}

impl Evaluator<'_> {
    fn evaluate(&self, x: Vec<f64>, acc: &mut ChunkResult) -> Result<()> {
        acc.drawn += 1;
        let residual = self.sys.residual(&x);
        let norm = vector_norm(&x, self.sys.norm());
        if residual <= 0.0 || residual > self.delta * (norm + 1.0) {
            return Ok(());
        }
        acc.valid += 1;
        let distance = point_to_polyhedron_distance(self.sys, &x, self.tol)?;
        let scale = match self.mode {
            Mode::Rhs => 1.0,
            Mode::Full => norm + 1.0,
        };
        let ratio = scale * distance / residual;
        if acc.best.as_ref().is_none_or(|b| ratio > b.ratio) {
            acc.best = Some(Best {
                ratio,
                x,
                residual,
                distance,
                norm,
            });
        }
        Ok(())
    }

    fn run_chunk(
        &self,
        source: Source<'_>,
        count: usize,
        seed: u64,
        stream: u64,
    ) -> Result<ChunkResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let n = self.sys.n();
        let mut acc = ChunkResult::default();
        for _ in 0..count {
            let x: Vec<f64> = match &source {
                Source::Uniform(r) => (0..n).map(|_| rng.random_range(-*r..=*r)).collect(),
                Source::Cloud(c) => c
                    .center
                    .iter()
                    .map(|ci| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        ci + c.radius * z
                    })
                    .collect(),
            };
            self.evaluate(x, &mut acc)?;
        }
        Ok(acc)
    }
}

fn chunk_sizes(total: usize) -> Vec<usize> {
    let mut sizes = vec![SAMPLE_CHUNK; total / SAMPLE_CHUNK];
    if !total.is_multiple_of(SAMPLE_CHUNK) {
        sizes.push(total % SAMPLE_CHUNK);
    }
    sizes
}

fn clouds(report: &ModulusReport, budget: usize) -> Vec<Cloud> {
    let centers: Vec<(&[f64], Vec<f64>)> = report
        .witnesses
        .iter()
        .flat_map(|w| {
            w.sets.iter().filter_map(move |s| {
                let len = vector_norm(&s.direction, Norm::L2);
                (len > 0.0).then(|| {
                    (
                        w.point.as_slice(),
                        s.direction.iter().map(|d| d / len).collect(),
                    )
                })
            })
        })
        .collect();
    if centers.is_empty() {
        return Vec::new();
    }
    let levels: Vec<f64> = TARGET_RADII.map(|k| 10f64.powi(-k)).collect();
    let per_level = budget / levels.len();
    let per_cloud = per_level / centers.len();
    let mut out = Vec::new();
    for (li, radius) in levels.iter().enumerate() {
        for (ci, (point, dir)) in centers.iter().enumerate() {
            let mut count = per_cloud;
            if ci == 0 {
                count += per_level - per_cloud * centers.len();
            }
            if li == 0 && ci == 0 {
                count += budget - per_level * levels.len();
            }
            out.push(Cloud {
                center: point.iter().zip(dir).map(|(p, d)| p + radius * d).collect(),
                radius: *radius,
                count,
            });
        }
    }
    out
}

fn default_box_radius(sys: &LinearSystem, tol: &Tolerances) -> Result<f64> {
    let e = restricted_vertices(sys, tol)?;
    let largest = e
        .points
        .iter()
        .map(|v| vector_norm(v, sys.norm()))
        .fold(0.0, f64::max);
    Ok(2.0 * (1.0 + largest))
}

fn estimate(
    sys: &LinearSystem,
    cfg: &EstimatorConfig,
    mode: Mode,
    tol: &Tolerances,
) -> Result<EstimateReport> {
    cfg.validate()?;
    if !is_feasible(sys, tol)? {
        return Err(Error::InfeasibleSystem);
    }
    let closed = lipusc(sys, mode, tol)?;
    if mode == Mode::Full && closed.case_tag == CaseTag::UnboundedInfinite {
        return Err(Error::UnboundedFullMode);
    }
    let box_radius = match cfg.box_radius {
        Some(r) => r,
        None => default_box_radius(sys, tol)?,
    };
    let eval = Evaluator {
        sys,
        mode,
        delta: cfg.delta,
        tol,
    };

    let mut jobs: Vec<(Source<'_>, usize, u64)> = chunk_sizes(cfg.samples)
        .into_iter()
        .enumerate()
        .map(|(i, c)| (Source::Uniform(box_radius), c, i as u64))
        .collect();
    let cloud_list = if cfg.targeted {
        clouds(&closed, cfg.samples)
    } else {
        Vec::new()
    };
    let mut stream = TARGET_STREAM_BASE;
    for cloud in &cloud_list {
        for c in chunk_sizes(cloud.count) {
            jobs.push((Source::Cloud(cloud), c, stream));
            stream += 1;
        }
    }

    let results: Vec<Result<ChunkResult>> = jobs
        .into_par_iter()
        .map(|(source, count, stream)| eval.run_chunk(source, count, cfg.seed, stream))
        .collect();
    let mut total = ChunkResult::default();
    for r in results {
        total = total.merge(r?);
    }

    let base = EstimateReport {
        mode,
        estimate: 0.0,
        best_x: None,
        residual: 0.0,
        distance: 0.0,
        norm: 0.0,
        delta_used: cfg.delta,
        box_radius,
        valid_samples: total.valid,
        drawn: total.drawn,
    };
    Ok(match total.best {
        Some(b) => EstimateReport {
            estimate: b.ratio,
            best_x: Some(b.x),
            residual: b.residual,
            distance: b.distance,
            norm: b.norm,
            ..base
        },
        None => base,
    })
}

/// Lower estimate of `lipusc_full`; refuses systems whose closed form is
/// `+inf` with [`Error::UnboundedFullMode`].
pub fn estimate_lipusc_full(
    sys: &LinearSystem,
    cfg: &EstimatorConfig,
    tol: &Tolerances,
) -> Result<EstimateReport> {
    estimate(sys, cfg, Mode::Full, tol)
}

pub fn estimate_lipusc_rhs(
    sys: &LinearSystem,
    cfg: &EstimatorConfig,
    tol: &Tolerances,
) -> Result<EstimateReport> {
    estimate(sys, cfg, Mode::Rhs, tol)
}

pub fn estimate_lipusc(
    sys: &LinearSystem,
    cfg: &EstimatorConfig,
    mode: Mode,
    tol: &Tolerances,
) -> Result<EstimateReport> {
    estimate(sys, cfg, mode, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceReport {
    pub holds: bool,
    pub face: ActiveIndexSet,
    /// Relative-interior probes and `clm_rhs` there.
    pub interior: Vec<(Vec<f64>, f64)>,
    pub vertex_values: Vec<(Vec<f64>, f64)>,
    pub interior_min: f64,
    pub interior_max: f64,
}

/// Rows outside `face` that are tight on the whole face.
fn implicit_equalities(
    face_sys: &LinearSystem,
    sys: &LinearSystem,
    face: &[usize],
    tol: &Tolerances,
) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for t in (0..sys.m()).filter(|t| !face.contains(t)) {
        // max b_t - a_t'x over the face, i.e. min a_t'x.
        let mut p = LpProblem::new(sys.row(t).to_vec());
        for (row, b) in face_sys.rows().iter().zip(face_sys.rhs()) {
            p = p.leq(row.clone(), *b);
        }
        let r = lp_solve(&p, tol)?;
        let tight = match r.status {
            LpStatus::Optimal => sys.rhs()[t] - r.objective_value.expect("optimal") <= tol.feas_tol,
            LpStatus::Unbounded => false,
            LpStatus::Infeasible => return Err(Error::EmptyFace),
        };
        if tight {
            out.push(t);
        }
    }
    Ok(out)
}

/// A point of the face maximising the smallest slack over the rows that are
/// not identically tight on it.
fn relative_center(sys: &LinearSystem, tight: &[usize], tol: &Tolerances) -> Result<Vec<f64>> {
    let n = sys.n();
    let mut obj = vec![0.0; n + 1];
    obj[n] = -1.0;
    let mut p = LpProblem::new(obj).bound(n, 0.0, 1.0);
    for t in 0..sys.m() {
        let mut row = sys.row(t).to_vec();
        if tight.contains(&t) {
            row.push(0.0);
            p = p.equal(row, sys.rhs()[t]);
        } else {
            row.push(1.0);
            p = p.leq(row, sys.rhs()[t]);
        }
    }
    let r = lp_solve(&p, tol)?;
    match r.status {
        LpStatus::Optimal => Ok(r.z.expect("optimal")[..n].to_vec()),
        LpStatus::Infeasible => Err(Error::EmptyFace),
        LpStatus::Unbounded => Err(Error::NumericalFailure {
            op: "face_constancy_check",
            detail: "bounded center LP reported unbounded".into(),
        }),
    }
}

/// Checks that `clm_rhs` is constant on the relative interior of the face
/// `{a_t'x = b_t (t in face), a_t'x <= b_t otherwise}` and no smaller at the
/// face's extreme points.
pub fn face_constancy_check(
    sys: &LinearSystem,
    face: &[usize],
    probes: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<FaceReport> {
    let mut face: Vec<usize> = face.to_vec();
    face.sort_unstable();
    face.dedup();
    if let Some(&t) = face.iter().find(|&&t| t >= sys.m()) {
        return Err(Error::DimensionMismatch {
            context: "face index",
            expected: sys.m(),
            actual: t + 1,
        });
    }
    let fsys = face_system(sys, &face)?;
    if !is_feasible(&fsys, tol)? {
        return Err(Error::EmptyFace);
    }
    let mut tight = face.clone();
    tight.extend(implicit_equalities(&fsys, sys, &face, tol)?);
    tight.sort_unstable();
    let center = relative_center(sys, &tight, tol)?;
    let face_vertices = vertices(&fsys, tol)?.points;

    let mut points = vec![center.clone()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while points.len() < probes.max(1) {
        if face_vertices.is_empty() {
            break;
        }
        let w: Vec<f64> = (0..face_vertices.len())
            .map(|_| Exp1.sample(&mut rng))
            .collect();
        let total: f64 = w.iter().sum();
        let x: Vec<f64> = (0..sys.n())
            .map(|i| {
                let hull: f64 = face_vertices
                    .iter()
                    .zip(&w)
                    .map(|(v, wi)| v[i] * wi)
                    .sum::<f64>()
                    / total;
                0.5 * center[i] + 0.5 * hull
            })
            .collect();
        points.push(x);
    }

    let mut interior = Vec::with_capacity(points.len());
    for x in points {
        let v = clm_rhs(sys, &x, tol)?.value.value();
        interior.push((x, v));
    }
    let mut vertex_values = Vec::with_capacity(face_vertices.len());
    for v in face_vertices {
        let c = clm_rhs(sys, &v, tol)?.value.value();
        vertex_values.push((v, c));
    }
    let interior_min = interior.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let interior_max = interior.iter().map(|p| p.1).fold(0.0, f64::max);
    let constant = interior_max - interior_min <= 1e-9 * (1.0 + interior_max);
    let dominated = vertex_values.iter().all(|(_, c)| *c >= interior_max - 1e-9);
    Ok(FaceReport {
        holds: constant && dominated,
        face: ActiveIndexSet(face),
        interior,
        vertex_values,
        interior_min,
        interior_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::*;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    fn cfg(samples: usize, seed: u64, targeted: bool) -> EstimatorConfig {
        EstimatorConfig {
            samples,
            seed,
            targeted,
            ..EstimatorConfig::default()
        }
    }

    #[test]
    fn rhs_estimate_is_bracketed() {
        let r = estimate_lipusc_rhs(&example1_limit(), &cfg(20_000, 7, true), &t()).unwrap();
        let closed = 5f64.sqrt();
        assert!(
            r.estimate >= 0.8 * closed && r.estimate <= closed + 1e-6,
            "{}",
            r.estimate
        );
        assert!(close(r.recomputed(), r.estimate, 1e-12));

        let r = estimate_lipusc_rhs(&example1_r(3.0), &cfg(20_000, 7, true), &t()).unwrap();
        let closed = 73f64.sqrt() / 3.0;
        assert!(
            r.estimate >= 0.8 * closed && r.estimate <= closed + 1e-6,
            "{}",
            r.estimate
        );
    }

    #[test]
    fn full_space_has_no_valid_samples() {
        let r = estimate_lipusc_full(&full_space(), &cfg(1000, 1, true), &t()).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.valid_samples, 0);
        assert!(r.best_x.is_none());
        assert_eq!(r.drawn, 1000);
    }

    #[test]
    fn feasible_only_box_gives_zero() {
        let c = EstimatorConfig {
            box_radius: Some(0.05),
            targeted: false,
            ..cfg(500, 3, false)
        };
        let shifted = sys(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![1.0, 1.0]);
        let r = estimate_lipusc_rhs(&shifted, &c, &t()).unwrap();
        assert_eq!(r.valid_samples, 0);
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn refuses_unbounded_full_mode() {
        assert_eq!(
            estimate_lipusc_full(&example2_limit(), &cfg(10, 1, true), &t()),
            Err(Error::UnboundedFullMode)
        );
        assert!(estimate_lipusc_rhs(&example2_limit(), &cfg(10, 1, true), &t()).is_ok());
    }

    #[test]
    fn deterministic_and_targeting_helps() {
        let s = example1_limit();
        let a = estimate_lipusc_full(&s, &cfg(8000, 42, true), &t()).unwrap();
        let b = estimate_lipusc_full(&s, &cfg(8000, 42, true), &t()).unwrap();
        assert_eq!(a, b);
        let u = estimate_lipusc_full(&s, &cfg(8000, 42, false), &t()).unwrap();
        assert!(a.estimate >= u.estimate);
        assert_eq!(a.drawn, 16_000);
    }

    #[test]
    fn rejects_bad_config() {
        let mut c = cfg(0, 1, true);
        assert!(estimate_lipusc_rhs(&strip(), &c, &t()).is_err());
        c.samples = 1;
        c.delta = 0.0;
        assert!(estimate_lipusc_rhs(&strip(), &c, &t()).is_err());
    }

    #[test]
    fn face_constancy_on_triangle() {
        let s = example1_limit();
        let edge = face_constancy_check(&s, &[2], 10, 5, &t()).unwrap();
        assert!(edge.holds);
        assert!(close(edge.interior_max, 1.0, 1e-12));
        assert_eq!(edge.interior.len(), 10);

        let edge = face_constancy_check(&s, &[0], 10, 5, &t()).unwrap();
        assert!(edge.holds);
        assert!(close(edge.interior_max, 1.0, 1e-12));

        let edge = face_constancy_check(&s, &[3], 10, 5, &t()).unwrap();
        assert!(edge.holds);
        assert!(close(edge.interior_max, 0.5f64.sqrt(), 1e-12));

        let vertex = face_constancy_check(&s, &[0, 3], 10, 5, &t()).unwrap();
        assert!(vertex.holds);
        assert!(close(vertex.interior_max, 5f64.sqrt(), 1e-12));

        assert_eq!(
            face_constancy_check(&s, &[0, 2, 3], 3, 1, &t()),
            Err(Error::EmptyFace)
        );
    }
}
