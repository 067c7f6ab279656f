//! Feasibility, boundedness, extreme points and active-index structure of
//! `F(A, b) = {x : Ax <= b}`.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{lp_feasible, lp_solve, LpProblem, LpStatus};
use crate::model::{dot, dual_norm, LinearSystem, Norm, Tolerances};

/// Above this many candidate indices the D-family enumeration refuses to run.
pub const MAX_D_CANDIDATES: usize = 20;

/// Recession directions in the unit box with a coordinate above this are
/// taken as a certificate of unboundedness.
const RECESSION_TOL: f64 = 1e-7;

/// Sorted 0-based row indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActiveIndexSet(pub Vec<usize>);

impl ActiveIndexSet {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.0.binary_search(&t).is_ok()
    }

    /// Row labels counted from 1, as used in printed tables.
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|t| t + 1).collect()
    }
}

impl fmt::Display for ActiveIndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.one_based().iter().join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSet {
    pub points: Vec<Vec<f64>>,
    pub active_sets: Vec<ActiveIndexSet>,
    /// True for `E(A, b)`, the extreme points of `F` intersected with the
    /// span of the rows.
    pub restricted: bool,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<f64>, &ActiveIndexSet)> {
        self.points.iter().zip(&self.active_sets)
    }
}

/// One member `D` of the D-family, with a direction `d` solving
/// `a_t'd = 1 (t in D)`, `a_t'd < 1 (t in T(x) \ D)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DMember {
    pub indices: Vec<usize>,
    pub direction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DFamily {
    /// The active set the family was built from.
    pub active: ActiveIndexSet,
    /// Always starts with the empty set; graded lexicographic order after that.
    pub sets: Vec<DMember>,
}

impl DFamily {
    pub fn nonempty(&self) -> impl Iterator<Item = &DMember> {
        self.sets.iter().filter(|m| !m.indices.is_empty())
    }

    pub fn contains(&self, indices: &[usize]) -> bool {
        self.sets.iter().any(|m| m.indices == indices)
    }
}

pub fn is_feasible(sys: &LinearSystem, tol: &Tolerances) -> Result<bool> {
    lp_feasible(sys.n(), (sys.rows(), sys.rhs()), (&[], &[]), tol)
}

/// Every constraint holds identically: zero gradient and nonnegative rhs.
pub fn is_full_space(sys: &LinearSystem, tol: &Tolerances) -> bool {
    (0..sys.m()).all(|t| {
        dual_norm(sys.row(t), sys.norm()) <= tol.active_tol && sys.rhs()[t] >= -tol.feas_tol
    })
}

/// Whether the recession cone `{d : Ad <= 0}` is trivial. Errors on an
/// infeasible system, whose boundedness is vacuous.
pub fn is_bounded(sys: &LinearSystem, tol: &Tolerances) -> Result<bool> {
    if !is_feasible(sys, tol)? {
        return Err(Error::InfeasibleSystem);
    }
    let n = sys.n();
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; n];
            c[i] = -sign;
            let mut p = LpProblem::new(c);
            for row in sys.rows() {
                p = p.leq(row.clone(), 0.0);
            }
            for j in 0..n {
                p = p.bound(j, -1.0, 1.0);
            }
            let r = lp_solve(&p, tol)?;
            match r.status {
                LpStatus::Optimal => {
                    if -r.objective_value.unwrap_or(0.0) > RECESSION_TOL {
                        return Ok(false);
                    }
                }
                status => {
                    return Err(Error::NumericalFailure {
                        op: "is_bounded",
                        detail: format!("recession LP returned {status:?}"),
                    })
                }
            }
        }
    }
    Ok(true)
}

/// Indices with `|a_t'x - b_t| <= active_tol`, computed without checking
/// feasibility.
pub(crate) fn tight_rows(sys: &LinearSystem, x: &[f64], tol: &Tolerances) -> ActiveIndexSet {
    ActiveIndexSet(
        (0..sys.m())
            .filter(|&t| sys.slack(t, x).abs() <= tol.active_tol)
            .collect(),
    )
}

pub(crate) fn check_feasible_point(sys: &LinearSystem, x: &[f64], tol: &Tolerances) -> Result<()> {
    if x.len() != sys.n() {
        return Err(Error::DimensionMismatch {
            context: "point dimension",
            expected: sys.n(),
            actual: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("point"));
    }
    let residual = sys.residual(x);
    if residual > tol.feas_tol {
        return Err(Error::InfeasiblePoint { residual });
    }
    Ok(())
}

/// `T(x)`, the constraints binding at the feasible point `x`.
pub fn active_set(sys: &LinearSystem, x: &[f64], tol: &Tolerances) -> Result<ActiveIndexSet> {
    check_feasible_point(sys, x, tol)?;
    Ok(tight_rows(sys, x, tol))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn enumerate_basic_points(
    rows: &[Vec<f64>],
    rhs: &[f64],
    n: usize,
    tol: &Tolerances,
) -> Vec<Vec<f64>> {
    let m = rows.len();
    let mut found: Vec<Vec<f64>> = Vec::new();
    if m < n {
        return found;
    }
    for subset in (0..m).combinations(n) {
        let sub: Vec<Vec<f64>> = subset.iter().map(|&t| rows[t].clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&t| rhs[t]).collect();
        let Some(mut x) = linalg::solve_square(&sub, &b) else {
            continue;
        };
        // No negative zeros in reported points.
        x.iter_mut().for_each(|v| *v += 0.0);
        let feasible = rows
            .iter()
            .zip(rhs)
            .all(|(a, b)| dot(a, &x) - b <= tol.feas_tol);
        if !feasible {
            continue;
        }
        let duplicate = found.iter().any(|p| {
            p.iter()
                .zip(&x)
                .all(|(u, v)| (u - v).abs() <= tol.dedupe_tol)
        });
        if !duplicate {
            found.push(x);
        }
    }
    found.sort_by(|a, b| lex_cmp(a, b));
    found
}

/// Extreme points of `F(A, b)` by exhaustive basis enumeration, in
/// lexicographic order.
pub fn vertices(sys: &LinearSystem, tol: &Tolerances) -> Result<VertexSet> {
    let points = enumerate_basic_points(sys.rows(), sys.rhs(), sys.n(), tol);
    let active_sets = points.iter().map(|x| tight_rows(sys, x, tol)).collect();
    Ok(VertexSet {
        points,
        active_sets,
        restricted: false,
    })
}

/// `E(A, b)`: extreme points of `F(A, b) ∩ span{a_t}`.
pub fn restricted_vertices(sys: &LinearSystem, tol: &Tolerances) -> Result<VertexSet> {
    let n = sys.n();
    let basis = linalg::row_space_basis(sys.rows(), n);
    let r = basis.ncols();
    if r == n {
        return Ok(VertexSet {
            restricted: true,
            ..vertices(sys, tol)?
        });
    }
    let points: Vec<Vec<f64>> = if r == 0 {
        // span{a_t} = {0}
        let origin = vec![0.0; n];
        if sys.residual(&origin) <= tol.feas_tol {
            vec![origin]
        } else {
            Vec::new()
        }
    } else {
        let reduced_rows: Vec<Vec<f64>> = sys
            .rows()
            .iter()
            .map(|a| {
                (0..r)
                    .map(|j| (0..n).map(|i| a[i] * basis[(i, j)]).sum())
                    .collect()
            })
            .collect();
        let mut pts: Vec<Vec<f64>> = enumerate_basic_points(&reduced_rows, sys.rhs(), r, tol)
            .into_iter()
            .map(|y| {
                (0..n)
                    .map(|i| (0..r).map(|j| basis[(i, j)] * y[j]).sum())
                    .collect()
            })
            .collect();
        pts.sort_by(|a, b| lex_cmp(a, b));
        pts
    };
    let active_sets = points.iter().map(|x| tight_rows(sys, x, tol)).collect();
    Ok(VertexSet {
        points,
        active_sets,
        restricted: true,
    })
}

/// Largest margin `s in [0, 1]` with `g_t'd = 1 (t in members)` and
/// `g_t'd + s <= 1` for the other gradients, plus the maximizing `d`.
/// `None` when the equalities are inconsistent.
pub(crate) fn strict_margin(
    gradients: &[&[f64]],
    members: &[usize],
    others: &[usize],
    tol: &Tolerances,
) -> Result<Option<(f64, Vec<f64>)>> {
    let n = gradients.first().map_or(0, |g| g.len());
    let mut c = vec![0.0; n + 1];
    c[n] = -1.0;
    let mut p = LpProblem::new(c).bound(n, 0.0, 1.0);
    for &t in members {
        let mut row = gradients[t].to_vec();
        row.push(0.0);
        p = p.equal(row, 1.0);
    }
    for &t in others {
        let mut row = gradients[t].to_vec();
        row.push(1.0);
        p = p.leq(row, 1.0);
    }
    let r = lp_solve(&p, tol)?;
    match r.status {
        LpStatus::Optimal => {
            let mut z = r.z.expect("optimal LP carries a point");
            let s = z.pop().expect("margin variable");
            Ok(Some((s, z)))
        }
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::NumericalFailure {
            op: "d_family",
            detail: "margin LP reported unbounded despite 0 <= s <= 1".into(),
        }),
    }
}

/// All subsets `D` of `gradients` (local indices) for which
/// `g'd = 1 (g in D)`, `g'd < 1 (g not in D)` is consistent, each with a
/// witness `d`. Zero gradients never enter any `D`; their strict
/// constraints `0 < 1` are vacuous.
pub fn consistent_subsets(
    gradients: &[&[f64]],
    norm: Norm,
    tol: &Tolerances,
) -> Result<Vec<DMember>> {
    let n = gradients.first().map_or(0, |g| g.len());
    let candidates: Vec<usize> = (0..gradients.len())
        .filter(|&t| dual_norm(gradients[t], norm) > tol.active_tol)
        .collect();
    if candidates.len() > MAX_D_CANDIDATES {
        return Err(Error::TooManyActive {
            count: candidates.len(),
            limit: MAX_D_CANDIDATES,
        });
    }
    let mut out = vec![DMember {
        indices: Vec::new(),
        direction: vec![0.0; n],
    }];
    for size in 1..=candidates.len() {
        for members in candidates.iter().copied().combinations(size) {
            let others: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|t| !members.contains(t))
                .collect();
            if let Some((s, d)) = strict_margin(gradients, &members, &others, tol)? {
                if s >= tol.strict_tol {
                    out.push(DMember {
                        indices: members,
                        direction: d,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// `D_{A,b}(x)`.
pub fn d_family(sys: &LinearSystem, x: &[f64], tol: &Tolerances) -> Result<DFamily> {
    let active = active_set(sys, x, tol)?;
    let gradients: Vec<&[f64]> = active.indices().iter().map(|&t| sys.row(t)).collect();
    let local = consistent_subsets(&gradients, sys.norm(), tol)?;
    let sets = local
        .into_iter()
        .map(|m| DMember {
            indices: m.indices.iter().map(|&i| active.0[i]).collect(),
            direction: m.direction,
        })
        .collect();
    Ok(DFamily { active, sets })
}

/// The face `F_I = {x in F : a_t'x = b_t, t in I}` written as a system.
pub fn face_system(sys: &LinearSystem, face: &[usize]) -> Result<LinearSystem> {
    let mut rows = sys.rows().to_vec();
    let mut rhs = sys.rhs().to_vec();
    for &t in face {
        if t >= sys.m() {
            return Err(Error::DimensionMismatch {
                context: "face index",
                expected: sys.m(),
                actual: t,
            });
        }
        rows.push(sys.row(t).iter().map(|v| -v).collect());
        rhs.push(-sys.rhs()[t]);
    }
    LinearSystem::new(rows, rhs, sys.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::*;

    #[test]
    fn feasibility() {
        let t = Tolerances::default();
        assert!(is_feasible(&example1_limit(), &t).unwrap());
        assert!(!is_feasible(&sys(vec![vec![1.0], vec![-1.0]], vec![-1.0, 0.0]), &t).unwrap());
        assert!(is_feasible(&sys(vec![vec![0.0, 0.0]], vec![1.0]), &t).unwrap());
    }

    #[test]
    fn full_space() {
        let t = Tolerances::default();
        assert!(is_full_space(
            &sys(vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![0.0, 1.0]),
            &t
        ));
        assert!(!is_full_space(&example1_limit(), &t));
        let empty = sys(vec![vec![0.0, 0.0]], vec![-1.0]);
        assert!(!is_full_space(&empty, &t));
        assert!(!is_feasible(&empty, &t).unwrap());
    }

    #[test]
    fn boundedness() {
        let t = Tolerances::default();
        assert!(is_bounded(&example1_limit(), &t).unwrap());
        assert!(!is_bounded(&example2_limit(), &t).unwrap());
        assert!(is_bounded(&sys(vec![vec![1.0], vec![-1.0]], vec![1.0, 0.0]), &t).unwrap());
        assert!(!is_bounded(&strip(), &t).unwrap());
        assert_eq!(
            is_bounded(&sys(vec![vec![1.0], vec![-1.0]], vec![-1.0, 0.0]), &t),
            Err(Error::InfeasibleSystem)
        );
    }

    #[test]
    fn active_sets() {
        let t = Tolerances::default();
        assert_eq!(
            active_set(&example1_r(3.0), &[1.0, -1.0], &t).unwrap().0,
            vec![0, 1, 3]
        );
        assert_eq!(
            active_set(&example1_limit(), &[0.0, 0.0], &t).unwrap().0,
            vec![1, 2, 3]
        );
        assert_eq!(
            active_set(&example1_limit(), &[0.5, -0.25], &t).unwrap().0,
            vec![1]
        );
        assert!(matches!(
            active_set(&example1_limit(), &[5.0, 5.0], &t),
            Err(Error::InfeasiblePoint { .. })
        ));
        assert_eq!(format!("{}", ActiveIndexSet(vec![0, 1, 3])), "{1,2,4}");
    }

    #[test]
    fn vertex_examples() {
        let t = Tolerances::default();
        let v = vertices(&example1_r(3.0), &t).unwrap();
        assert_points(
            &v.points,
            &[vec![0.0, 0.0], vec![2.0 / 3.0, 0.0], vec![1.0, -1.0]],
            1e-12,
        );
        assert!(!v.restricted);
        assert_eq!(v.active_sets[0].0, vec![2, 3]);
        assert_eq!(v.active_sets[1].0, vec![1, 2]);
        assert_eq!(v.active_sets[2].0, vec![0, 1, 3]);

        let v = vertices(&example1_limit(), &t).unwrap();
        assert_points(
            &v.points,
            &[vec![0.0, 0.0], vec![1.0, -1.0], vec![1.0, 0.0]],
            1e-12,
        );

        assert!(vertices(&strip(), &t).unwrap().is_empty());
    }

    #[test]
    fn restricted_examples() {
        let t = Tolerances::default();
        let e = restricted_vertices(&example1_limit(), &t).unwrap();
        assert!(e.restricted);
        assert_eq!(e.points, vertices(&example1_limit(), &t).unwrap().points);

        let e = restricted_vertices(&strip(), &t).unwrap();
        assert_points(&e.points, &[vec![0.0, 0.0], vec![1.0, 0.0]], 1e-12);
        assert_eq!(e.active_sets[0].0, vec![1]);
        assert_eq!(e.active_sets[1].0, vec![0]);

        let zero = sys(vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![0.0, 1.0]);
        let e = restricted_vertices(&zero, &t).unwrap();
        assert_eq!(e.points, vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn d_family_examples() {
        let t = Tolerances::default();
        let fam = d_family(&example1_limit(), &[1.0, -1.0], &t).unwrap();
        let sets: Vec<Vec<usize>> = fam.sets.iter().map(|m| m.indices.clone()).collect();
        assert_eq!(sets, vec![vec![], vec![0], vec![3], vec![0, 3]]);
        assert_eq!(fam.sets[0].direction, vec![0.0, 0.0]);

        let fam = d_family(&example1_limit(), &[0.5, -0.25], &t).unwrap();
        assert_eq!(fam.sets.len(), 1);

        let fam = d_family(&example1_limit(), &[0.0, 0.0], &t).unwrap();
        let sets: Vec<Vec<usize>> = fam.sets.iter().map(|m| m.indices.clone()).collect();
        assert_eq!(sets, vec![vec![], vec![2], vec![3], vec![2, 3]]);
    }

    #[test]
    fn d_family_witnesses_solve_the_strict_system() {
        let t = Tolerances::default();
        for (s, x) in [
            (example1_limit(), vec![1.0, -1.0]),
            (example1_limit(), vec![1.0, 0.0]),
            (example1_r(3.0), vec![1.0, -1.0]),
            (example1_r(3.0), vec![2.0 / 3.0, 0.0]),
        ] {
            let fam = d_family(&s, &x, &t).unwrap();
            for m in &fam.sets {
                for &i in fam.active.indices() {
                    let v = dot(s.row(i), &m.direction);
                    if m.indices.contains(&i) {
                        assert!((v - 1.0).abs() <= t.active_tol);
                    } else {
                        assert!(v <= 1.0 - t.strict_tol);
                    }
                }
            }
        }
    }

    #[test]
    fn too_many_candidates() {
        let rows: Vec<Vec<f64>> = (0..21).map(|i| vec![1.0 + i as f64, 1.0]).collect();
        let g: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        assert!(matches!(
            consistent_subsets(&g, Norm::L2, &Tolerances::default()),
            Err(Error::TooManyActive { count: 21, .. })
        ));
    }

    #[test]
    fn face_of_triangle() {
        let t = Tolerances::default();
        let f = face_system(&example1_limit(), &[2]).unwrap();
        let v = vertices(&f, &t).unwrap();
        assert_points(&v.points, &[vec![0.0, 0.0], vec![1.0, 0.0]], 1e-12);
    }
}
