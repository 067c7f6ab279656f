//! Calmness moduli at a point and Lipschitz upper semicontinuity moduli of
//! the feasible set mapping, under right-hand-side (`Rhs`) and full
//! coefficient (`Full`) perturbations.
//!
//! At a feasible `x`:
//!
//! ```text
//! clm_rhs(x)  = max_{D in D(x)} 1 / dist_*(0, conv{a_t : t in D})
//! clm_full(x) = (||x|| + 1) * clm_rhs(x)
//! ```
//!
//! and both Lipschitz moduli are maxima of the corresponding calmness
//! modulus over `E(A, b)`, except that under full perturbations an
//! unbounded feasible set forces `+inf` (or a closed form when `n = 1`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::min_norm_point;
use crate::lp::{lp_solve, LpProblem, LpStatus};
use crate::model::{dual_norm, vector_norm, ExtendedNonneg, LinearSystem, Tolerances};
use crate::polyhedron::{
    d_family, is_bounded, is_feasible, is_full_space, restricted_vertices, ActiveIndexSet,
};

/// Relative tolerance for reporting tied maximizers.
pub const TIE_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    Bounded,
    FullSpace,
    HalfLineN1,
    UnboundedInfinite,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::Bounded => "Bounded",
            CaseTag::FullSpace => "FullSpace",
            CaseTag::HalfLineN1 => "HalfLineN1",
            CaseTag::UnboundedInfinite => "UnboundedInfinite",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rhs,
    Full,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rhs" => Ok(Mode::Rhs),
            "full" => Ok(Mode::Full),
            other => Err(format!("unknown mode `{other}` (expected rhs or full)")),
        }
    }
}

/// A maximizing index set `D` with its direction and hull distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetWitness {
    pub indices: Vec<usize>,
    pub direction: Vec<f64>,
    pub hull_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClmValue {
    pub value: ExtendedNonneg,
    pub active: ActiveIndexSet,
    /// Every `D` attaining the max; empty when only `D = ∅` is consistent.
    pub witnesses: Vec<SetWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointWitness {
    pub point: Vec<f64>,
    pub active: ActiveIndexSet,
    pub sets: Vec<SetWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusReport {
    pub value: ExtendedNonneg,
    pub case_tag: CaseTag,
    pub witnesses: Vec<PointWitness>,
    pub mode: Mode,
}

fn ties(value: f64, best: f64) -> bool {
    (value - best).abs() <= TIE_RTOL * best.abs()
}

/// Calmness modulus of `b -> F(A, b)` at `(b, x)`.
pub fn clm_rhs(sys: &LinearSystem, x: &[f64], tol: &Tolerances) -> Result<ClmValue> {
    let family = d_family(sys, x, tol)?;
    let mut scored: Vec<(f64, SetWitness)> = Vec::new();
    for member in family.nonempty() {
        let grads: Vec<&[f64]> = member.indices.iter().map(|&t| sys.row(t)).collect();
        let hd = min_norm_point(&grads, sys.norm(), tol)?;
        let dist = hd.distance.value();
        if dist <= 0.0 {
            return Err(Error::NumericalFailure {
                op: "clm_rhs",
                detail: format!(
                    "consistent set {:?} has the origin in its hull",
                    member.indices
                ),
            });
        }
        scored.push((
            1.0 / dist,
            SetWitness {
                indices: member.indices.clone(),
                direction: member.direction.clone(),
                hull_distance: dist,
            },
        ));
    }
    let best = scored.iter().map(|s| s.0).fold(0.0, f64::max);
    let witnesses = if best > 0.0 {
        scored
            .into_iter()
            .filter(|s| ties(s.0, best))
            .map(|s| s.1)
            .collect()
    } else {
        Vec::new()
    };
    Ok(ClmValue {
        value: ExtendedNonneg::new(best),
        active: family.active,
        witnesses,
    })
}

/// Calmness modulus of `(A, b) -> F(A, b)` at `((A, b), x)`.
pub fn clm_full(sys: &LinearSystem, x: &[f64], tol: &Tolerances) -> Result<ClmValue> {
    let rhs = clm_rhs(sys, x, tol)?;
    Ok(ClmValue {
        value: ExtendedNonneg::new((vector_norm(x, sys.norm()) + 1.0) * rhs.value.value()),
        ..rhs
    })
}

pub fn clm(sys: &LinearSystem, x: &[f64], mode: Mode, tol: &Tolerances) -> Result<ClmValue> {
    match mode {
        Mode::Rhs => clm_rhs(sys, x, tol),
        Mode::Full => clm_full(sys, x, tol),
    }
}

fn max_over_points(
    sys: &LinearSystem,
    points: &[Vec<f64>],
    mode: Mode,
    tol: &Tolerances,
) -> Result<(f64, Vec<PointWitness>)> {
    let mut scored = Vec::with_capacity(points.len());
    for x in points {
        let c = clm(sys, x, mode, tol)?;
        scored.push((c.value.value(), x.clone(), c));
    }
    let best = scored.iter().map(|s| s.0).fold(0.0, f64::max);
    if best == 0.0 {
        return Ok((0.0, Vec::new()));
    }
    let witnesses = scored
        .into_iter()
        .filter(|s| ties(s.0, best))
        .map(|(_, point, c)| PointWitness {
            point,
            active: c.active,
            sets: c.witnesses,
        })
        .collect();
    Ok((best, witnesses))
}

/// Lipschitz upper semicontinuity modulus of `b -> F(A, b)`; always finite.
pub fn lipusc_rhs(sys: &LinearSystem, tol: &Tolerances) -> Result<ModulusReport> {
    if !is_feasible(sys, tol)? {
        return Err(Error::InfeasibleSystem);
    }
    if is_full_space(sys, tol) {
        return Ok(ModulusReport {
            value: ExtendedNonneg::ZERO,
            case_tag: CaseTag::FullSpace,
            witnesses: Vec::new(),
            mode: Mode::Rhs,
        });
    }
    let e = restricted_vertices(sys, tol)?;
    let (value, witnesses) = max_over_points(sys, &e.points, Mode::Rhs, tol)?;
    Ok(ModulusReport {
        value: ExtendedNonneg::new(value),
        case_tag: CaseTag::Bounded,
        witnesses,
        mode: Mode::Rhs,
    })
}

/// `inf F` and `sup F` of a one-dimensional feasible set (`None` = infinite).
fn interval_ends(sys: &LinearSystem, tol: &Tolerances) -> Result<(Option<f64>, Option<f64>)> {
    let mut ends = [None, None];
    for (slot, c) in ends.iter_mut().zip([1.0, -1.0]) {
        let mut p = LpProblem::new(vec![c]);
        for (row, b) in sys.rows().iter().zip(sys.rhs()) {
            p = p.leq(row.clone(), *b);
        }
        let r = lp_solve(&p, tol)?;
        *slot = match r.status {
            LpStatus::Optimal => Some(r.z.expect("optimal")[0]),
            LpStatus::Unbounded => None,
            LpStatus::Infeasible => return Err(Error::InfeasibleSystem),
        };
    }
    Ok((ends[0], ends[1]))
}

/// Lipschitz upper semicontinuity modulus of `(A, b) -> F(A, b)`.
pub fn lipusc_full(sys: &LinearSystem, tol: &Tolerances) -> Result<ModulusReport> {
    if !is_feasible(sys, tol)? {
        return Err(Error::InfeasibleSystem);
    }
    if is_full_space(sys, tol) {
        return Ok(ModulusReport {
            value: ExtendedNonneg::ZERO,
            case_tag: CaseTag::FullSpace,
            witnesses: Vec::new(),
            mode: Mode::Full,
        });
    }
    if is_bounded(sys, tol)? {
        let e = restricted_vertices(sys, tol)?;
        if e.is_empty() {
            return Err(Error::NumericalFailure {
                op: "lipusc_full",
                detail: "bounded nonempty feasible set without extreme points".into(),
            });
        }
        let (value, witnesses) = max_over_points(sys, &e.points, Mode::Full, tol)?;
        return Ok(ModulusReport {
            value: ExtendedNonneg::new(value),
            case_tag: CaseTag::Bounded,
            witnesses,
            mode: Mode::Full,
        });
    }
    if sys.n() == 1 {
        let endpoint = match interval_ends(sys, tol)? {
            (Some(lo), None) => lo,
            (None, Some(hi)) => hi,
            ends => {
                return Err(Error::NumericalFailure {
                    op: "lipusc_full",
                    detail: format!("unbounded one-dimensional set with ends {ends:?}"),
                })
            }
        };
        let x = vec![endpoint];
        let c = clm_rhs(sys, &x, tol)?;
        let largest = c
            .active
            .indices()
            .iter()
            .map(|&t| dual_norm(sys.row(t), sys.norm()))
            .fold(0.0, f64::max);
        if largest <= tol.active_tol {
            return Err(Error::NumericalFailure {
                op: "lipusc_full",
                detail: "half-line endpoint without a binding nonzero row".into(),
            });
        }
        let value = (vector_norm(&x, sys.norm()) + 1.0) / largest;
        return Ok(ModulusReport {
            value: ExtendedNonneg::new(value),
            case_tag: CaseTag::HalfLineN1,
            witnesses: vec![PointWitness {
                point: x,
                active: c.active,
                sets: c.witnesses,
            }],
            mode: Mode::Full,
        });
    }
    Ok(ModulusReport {
        value: ExtendedNonneg::INFINITY,
        case_tag: CaseTag::UnboundedInfinite,
        witnesses: Vec::new(),
        mode: Mode::Full,
    })
}

pub fn lipusc(sys: &LinearSystem, mode: Mode, tol: &Tolerances) -> Result<ModulusReport> {
    match mode {
        Mode::Rhs => lipusc_rhs(sys, tol),
        Mode::Full => lipusc_full(sys, tol),
    }
}
