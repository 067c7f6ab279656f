//! CSV export of the hull of the active gradients in the plane, tagged by
//! membership in its end set.

use linstab::{active_set, dual_norm, end_set_distance, in_end_set, LinearSystem, Tolerances};

use crate::CliError;

/// Boundary samples along the hull perimeter.
pub const BOUNDARY_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct EndsetRow {
    pub point: [f64; 2],
    pub in_end_set: bool,
    pub witness: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EndsetData {
    pub rows: Vec<EndsetRow>,
    pub warnings: Vec<String>,
}

impl EndsetData {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,in_end_set,witness\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.point[0], r.point[1], r.in_end_set as u8, r.witness as u8
            ));
        }
        out
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull vertices (monotone chain); collinear input gives
/// the two extreme points.
fn hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup_by(|a, b| (a[0] - b[0]).abs() <= 1e-14 && (a[1] - b[1]).abs() <= 1e-14);
    if p.len() < 3 {
        return p;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 1e-14
        {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 1e-14
        {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// `count` points equally spaced by arc length along the closed polygon.
fn perimeter_samples(poly: &[[f64; 2]], count: usize) -> Vec<[f64; 2]> {
    let edges: Vec<([f64; 2], [f64; 2], f64)> = (0..poly.len())
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            (a, b, ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt())
        })
        .collect();
    let total: f64 = edges.iter().map(|e| e.2).sum();
    let mut out = Vec::with_capacity(count);
    let mut edge = 0;
    let mut start = 0.0;
    for k in 0..count {
        let s = total * k as f64 / count as f64;
        while edge + 1 < edges.len() && s > start + edges[edge].2 {
            start += edges[edge].2;
            edge += 1;
        }
        let (a, b, len) = edges[edge];
        let f = if len > 0.0 {
            ((s - start) / len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]);
    }
    out
}

pub fn endset_data(
    sys: &LinearSystem,
    x: &[f64],
    tol: &Tolerances,
) -> Result<EndsetData, CliError> {
    if sys.n() != 2 {
        return Err(CliError::Parse(format!(
            "endset: the export is planar and needs n = 2 (system has n = {})",
            sys.n()
        )));
    }
    let active = active_set(sys, x, tol).map_err(|e| CliError::core("endset", e))?;
    let grads: Vec<[f64; 2]> = active
        .indices()
        .iter()
        .map(|&t| sys.row(t))
        .filter(|a| dual_norm(a, sys.norm()) > tol.active_tol)
        .map(|a| [a[0], a[1]])
        .collect();
    let mut data = EndsetData::default();
    if grads.is_empty() {
        data.warnings.push(format!(
            "endset: no nonzero active gradient at the point (active set {active}); the end set is empty"
        ));
        return Ok(data);
    }
    let refs: Vec<&[f64]> = grads.iter().map(|g| g.as_slice()).collect();
    let poly = hull(&grads);
    let samples = if poly.len() == 1 {
        poly.clone()
    } else {
        perimeter_samples(&poly, BOUNDARY_SAMPLES)
    };
    for p in samples {
        let inside = in_end_set(&refs, &p, tol).map_err(|e| CliError::core("endset", e))?;
        data.rows.push(EndsetRow {
            point: p,
            in_end_set: inside,
            witness: false,
        });
    }
    let end = end_set_distance(&refs, sys.norm(), tol).map_err(|e| CliError::core("endset", e))?;
    if let Some(w) = end.witness {
        let w = [w[0], w[1]];
        match data
            .rows
            .iter_mut()
            .find(|r| (r.point[0] - w[0]).abs() <= 1e-12 && (r.point[1] - w[1]).abs() <= 1e-12)
        {
            Some(row) => row.witness = true,
            None => {
                let inside = in_end_set(&refs, &w, tol).map_err(|e| CliError::core("endset", e))?;
                data.rows.push(EndsetRow {
                    point: w,
                    in_end_set: inside,
                    witness: true,
                });
            }
        }
    }
    Ok(data)
}
