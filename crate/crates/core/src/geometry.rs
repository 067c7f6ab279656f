//! Dual-norm distances from the origin to convex hulls and end sets, and
//! point-to-polyhedron distances.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{lp_solve, LpProblem, LpStatus};
use crate::model::{dot, dual_norm, ExtendedNonneg, LinearSystem, Norm, Tolerances};
use crate::polyhedron::{consistent_subsets, is_feasible};

/// Iteration cap of the Wolfe method (major and minor cycles together).
pub const WOLFE_MAX_ITER: usize = 10_000;

/// Samples per independently seeded chunk of the end-set oracle.
const ORACLE_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullDistance {
    pub distance: ExtendedNonneg,
    /// Minimizer of the dual norm over the hull.
    pub witness: Option<Vec<f64>>,
    /// Convex weights on the input points reproducing `witness`.
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndSetDistance {
    pub distance: ExtendedNonneg,
    pub witness: Option<Vec<f64>>,
    /// The consistent subset (local indices) whose hull holds the witness.
    pub subset: Option<Vec<usize>>,
}

fn combine(points: &[&[f64]], weights: &[f64]) -> Vec<f64> {
    let n = points[0].len();
    let mut x = vec![0.0; n];
    for (p, w) in points.iter().zip(weights) {
        if *w != 0.0 {
            for (xi, pi) in x.iter_mut().zip(p.iter()) {
                *xi += w * pi;
            }
        }
    }
    x
}

/// Minimizes `||u||_*` over `u in conv S`. `norm` is the variable-space
/// norm; its dual is measured. Empty `S` gives `+inf`.
pub fn min_norm_point(points: &[&[f64]], norm: Norm, tol: &Tolerances) -> Result<HullDistance> {
    if points.is_empty() {
        return Ok(HullDistance {
            distance: ExtendedNonneg::INFINITY,
            witness: None,
            weights: None,
        });
    }
    let n = points[0].len();
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            context: "min_norm_point point dimension",
            expected: n,
            actual: points
                .iter()
                .map(|p| p.len())
                .find(|&l| l != n)
                .unwrap_or(n),
        });
    }
    let weights = match norm.dual() {
        Norm::L2 => wolfe(points, tol)?,
        dual => hull_lp(points, dual, tol)?,
    };
    let witness = combine(points, &weights);
    Ok(HullDistance {
        distance: ExtendedNonneg::new(dual_norm(&witness, norm)),
        witness: Some(witness),
        weights: Some(weights),
    })
}

/// Wolfe's min-norm-point method in the Euclidean norm.
fn wolfe(points: &[&[f64]], tol: &Tolerances) -> Result<Vec<f64>> {
    let k = points.len();
    let sq: Vec<f64> = points.iter().map(|p| dot(p, p)).collect();
    let max_sq = sq.iter().copied().fold(0.0, f64::max);
    let start = (0..k).fold(0, |best, j| if sq[j] < sq[best] { j } else { best });

    let mut corral = vec![start];
    let mut w = vec![1.0];
    let mut x = points[start].to_vec();
    let mut iterations = 0usize;

    loop {
        iterations += 1;
        if iterations > WOLFE_MAX_ITER {
            return Err(Error::ConvergenceFailure {
                op: "min_norm_point",
                iterations: WOLFE_MAX_ITER,
            });
        }
        let xx = dot(&x, &x);
        if xx <= tol.conv_tol * max_sq {
            break;
        }
        let (j, xp) =
            (0..k)
                .map(|j| (j, dot(&x, points[j])))
                .fold(
                    (0, f64::INFINITY),
                    |acc, cur| if cur.1 < acc.1 { cur } else { acc },
                );
        if xx - xp <= tol.conv_tol * max_sq || corral.contains(&j) {
            break;
        }
        corral.push(j);
        w.push(0.0);

        loop {
            iterations += 1;
            if iterations > WOLFE_MAX_ITER {
                return Err(Error::ConvergenceFailure {
                    op: "min_norm_point",
                    iterations: WOLFE_MAX_ITER,
                });
            }
            let alpha = affine_minimizer(points, &corral);
            if alpha.iter().all(|&a| a > 1e-14) {
                w = alpha;
                break;
            }
            let mut theta = 1.0f64;
            let mut drop = 0usize;
            for (i, (&wi, &ai)) in w.iter().zip(&alpha).enumerate() {
                if ai <= 1e-14 {
                    let denom = wi - ai;
                    let t = if denom > 0.0 { wi / denom } else { 0.0 };
                    if t < theta {
                        theta = t;
                        drop = i;
                    }
                }
            }
            for (wi, ai) in w.iter_mut().zip(&alpha) {
                *wi = theta * ai + (1.0 - theta) * *wi;
            }
            w[drop] = 0.0;
            let mut i = 0;
            while i < corral.len() {
                if w[i] <= 1e-15 {
                    corral.remove(i);
                    w.remove(i);
                } else {
                    i += 1;
                }
            }
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= total);
            if corral.len() <= 1 {
                break;
            }
        }
        let pts: Vec<&[f64]> = corral.iter().map(|&c| points[c]).collect();
        x = combine(&pts, &w);
    }

    let mut weights = vec![0.0; k];
    for (&c, &wi) in corral.iter().zip(&w) {
        weights[c] = wi;
    }
    Ok(weights)
}

/// Affine weights (summing to one) of the min-norm point of the affine hull
/// of the selected points.
fn affine_minimizer(points: &[&[f64]], idx: &[usize]) -> Vec<f64> {
    // x = p0 + sum t_i (p_i - p0); least squares on the differences.
    let r = idx.len();
    let p0 = points[idx[0]];
    let n = p0.len();
    if r == 1 {
        return vec![1.0];
    }
    let v = DMatrix::from_fn(n, r - 1, |i, j| points[idx[j + 1]][i] - p0[i]);
    let rhs = DVector::from_iterator(n, p0.iter().map(|a| -a));
    let t = linalg::lstsq(&v, &rhs);
    let mut w = Vec::with_capacity(r);
    w.push(1.0 - t.iter().sum::<f64>());
    w.extend(t.iter().copied());
    w
}

/// Exact LP for the L1 or Linf dual norm.
fn hull_lp(points: &[&[f64]], dual: Norm, tol: &Tolerances) -> Result<Vec<f64>> {
    let k = points.len();
    let n = points[0].len();
    let extra = if dual == Norm::Linf { 1 } else { n };
    let mut c = vec![0.0; k + extra];
    c[k..].iter_mut().for_each(|v| *v = 1.0);
    let mut p = LpProblem::new(c);
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut row = vec![0.0; k + extra];
            for i in 0..k {
                row[i] = sign * points[i][j];
            }
            let aux = if dual == Norm::Linf { k } else { k + j };
            row[aux] = -1.0;
            p = p.leq(row, 0.0);
        }
    }
    let mut simplex = vec![0.0; k + extra];
    simplex[..k].iter_mut().for_each(|v| *v = 1.0);
    p = p.equal(simplex, 1.0);
    for i in 0..k {
        p = p.nonneg(i);
    }
    let r = lp_solve(&p, tol)?;
    if r.status != LpStatus::Optimal {
        return Err(Error::NumericalFailure {
            op: "min_norm_point",
            detail: format!("hull LP returned {:?}", r.status),
        });
    }
    let z = r.z.expect("optimal");
    let mut w: Vec<f64> = z[..k].iter().map(|v| v.max(0.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    Ok(w)
}

/// Dual-norm distance from the origin to `end conv S`, computed as the
/// smallest hull distance over the consistent subsets of `S`.
pub fn end_set_distance(points: &[&[f64]], norm: Norm, tol: &Tolerances) -> Result<EndSetDistance> {
    let mut best = EndSetDistance {
        distance: ExtendedNonneg::INFINITY,
        witness: None,
        subset: None,
    };
    if points.is_empty() {
        return Ok(best);
    }
    for member in consistent_subsets(points, norm, tol)? {
        if member.indices.is_empty() {
            continue;
        }
        let sub: Vec<&[f64]> = member.indices.iter().map(|&i| points[i]).collect();
        let hd = min_norm_point(&sub, norm, tol)?;
        if hd.distance < best.distance {
            best = EndSetDistance {
                distance: hd.distance,
                witness: hd.witness,
                subset: Some(member.indices),
            };
        }
    }
    Ok(best)
}

/// `max{mu : mu u in conv S}`; `None` when the ray stays in the hull
/// (only possible for `u = 0`), and an error when `u` is not in the cone
/// spanned by `S`.
///
/// Solved as `min sum(v)` over `v >= 0` with `sum v_i s_i = u`, so that
/// `mu = 1 / sum(v)`.
pub fn ray_exit_scale(points: &[&[f64]], u: &[f64], tol: &Tolerances) -> Result<Option<f64>> {
    let k = points.len();
    let n = u.len();
    if u.iter().all(|v| *v == 0.0) {
        let mut p = LpProblem::feasibility(k).equal(vec![1.0; k], 1.0);
        for j in 0..n {
            p = p.equal(points.iter().map(|s| s[j]).collect(), 0.0);
        }
        for i in 0..k {
            p = p.nonneg(i);
        }
        return match lp_solve(&p, tol)?.status {
            LpStatus::Infeasible => Err(Error::DegenerateInput(
                "ray_exit_scale: point outside the hull",
            )),
            _ => Ok(None),
        };
    }
    let mut p = LpProblem::new(vec![1.0; k]);
    for j in 0..n {
        p = p.equal(points.iter().map(|s| s[j]).collect(), u[j]);
    }
    for i in 0..k {
        p = p.nonneg(i);
    }
    let r = lp_solve(&p, tol)?;
    match r.status {
        LpStatus::Optimal => {
            let total = r.objective_value.expect("optimal");
            if total <= 0.0 {
                return Err(Error::NumericalFailure {
                    op: "ray_exit_scale",
                    detail: format!("nonzero point with cone weight {total}"),
                });
            }
            Ok(Some(1.0 / total))
        }
        LpStatus::Unbounded => unreachable!("nonnegative weights with a nonnegative cost"),
        LpStatus::Infeasible => Err(Error::DegenerateInput(
            "ray_exit_scale: point outside the hull",
        )),
    }
}

/// Whether `u in conv S` lies in `end conv S`.
pub fn in_end_set(points: &[&[f64]], u: &[f64], tol: &Tolerances) -> Result<bool> {
    Ok(match ray_exit_scale(points, u, tol)? {
        Some(mu) => mu <= 1.0 + tol.strict_tol.max(1e-9),
        None => false,
    })
}

/// Sampling estimate of the end-set distance: random hull points are pushed
/// out along their ray to the hull boundary and the smallest dual norm is
/// kept. Converges to the true distance from above.
///
/// Each weight vector is Dirichlet on a random support (uniform size, then a
/// uniform subset), so edges and facets crossed by grazing rays are sampled
/// directly.
pub fn end_set_distance_oracle(
    points: &[&[f64]],
    norm: Norm,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::DegenerateInput(
            "end_set_distance_oracle: empty point set",
        ));
    }
    let hull = min_norm_point(points, norm, tol)?;
    let scale = points
        .iter()
        .map(|p| dual_norm(p, norm))
        .fold(0.0, f64::max);
    if hull.distance.value() <= tol.conv_tol.sqrt() * scale {
        return Err(Error::DegenerateInput(
            "end_set_distance_oracle: origin lies in the hull",
        ));
    }
    if points.len() == 1 {
        return Ok(dual_norm(points[0], norm));
    }
    let chunks = samples.div_ceil(ORACLE_CHUNK);
    let results: Result<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = ORACLE_CHUNK.min(samples - chunk * ORACLE_CHUNK);
            let mut best = f64::INFINITY;
            let k = points.len();
            let mut lambda = vec![0.0; k];
            let mut order: Vec<usize> = (0..k).collect();
            for _ in 0..count {
                let support = rng.random_range(1..=k);
                lambda.iter_mut().for_each(|l| *l = 0.0);
                for i in 0..support {
                    let j = rng.random_range(i..k);
                    order.swap(i, j);
                    lambda[order[i]] = Exp1.sample(&mut rng);
                }
                let total: f64 = lambda.iter().sum();
                lambda.iter_mut().for_each(|l| *l /= total);
                let u = combine(points, &lambda);
                let Some(mu) = ray_exit_scale(points, &u, tol)? else {
                    continue;
                };
                let v: Vec<f64> = u.iter().map(|c| c * mu).collect();
                best = best.min(dual_norm(&v, norm));
            }
            Ok(best)
        })
        .collect();
    Ok(results?.into_iter().fold(f64::INFINITY, f64::min))
}

/// Nearest point of `F(A, b)` to `x` in the system's norm, and the distance.
pub fn nearest_point(sys: &LinearSystem, x: &[f64], tol: &Tolerances) -> Result<(Vec<f64>, f64)> {
    if x.len() != sys.n() {
        return Err(Error::DimensionMismatch {
            context: "point dimension",
            expected: sys.n(),
            actual: x.len(),
        });
    }
    if !is_feasible(sys, tol)? {
        return Err(Error::InfeasibleSystem);
    }
    if sys.residual(x) <= tol.feas_tol {
        return Ok((x.to_vec(), 0.0));
    }
    match sys.norm() {
        Norm::L2 => {
            let start = polyhedral_projection(sys, x, Norm::Linf, tol)?;
            let z = euclidean_projection(sys, x, start, tol)?;
            let d = Norm::L2.eval(&x.iter().zip(&z).map(|(a, b)| a - b).collect::<Vec<_>>());
            Ok((z, d))
        }
        norm => {
            let z = polyhedral_projection(sys, x, norm, tol)?;
            let d = norm.eval(&x.iter().zip(&z).map(|(a, b)| a - b).collect::<Vec<_>>());
            Ok((z, d))
        }
    }
}

/// `dist(x, F(A, b))` in the system's norm.
pub fn point_to_polyhedron_distance(
    sys: &LinearSystem,
    x: &[f64],
    tol: &Tolerances,
) -> Result<f64> {
    nearest_point(sys, x, tol).map(|(_, d)| d)
}

/// LP projection for the L1 or Linf norm.
fn polyhedral_projection(
    sys: &LinearSystem,
    x: &[f64],
    norm: Norm,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let n = sys.n();
    let extra = if norm == Norm::Linf { 1 } else { n };
    let mut c = vec![0.0; n + extra];
    c[n..].iter_mut().for_each(|v| *v = 1.0);
    let mut p = LpProblem::new(c);
    for (row, b) in sys.rows().iter().zip(sys.rhs()) {
        let mut r = row.clone();
        r.resize(n + extra, 0.0);
        p = p.leq(r, *b);
    }
    for j in 0..n {
        let aux = if norm == Norm::Linf { n } else { n + j };
        for sign in [1.0, -1.0] {
            let mut r = vec![0.0; n + extra];
            r[j] = sign;
            r[aux] = -1.0;
            p = p.leq(r, sign * x[j]);
        }
    }
    let r = lp_solve(&p, tol)?;
    match r.status {
        LpStatus::Optimal => {
            let mut z = r.z.expect("optimal");
            z.truncate(n);
            Ok(z)
        }
        LpStatus::Infeasible => Err(Error::InfeasibleSystem),
        LpStatus::Unbounded => Err(Error::NumericalFailure {
            op: "point_to_polyhedron_distance",
            detail: "projection LP unbounded".into(),
        }),
    }
}

/// Primal active-set method for `min ||z - x||_2` over `Az <= b`, started
/// from a feasible `z`.
fn euclidean_projection(
    sys: &LinearSystem,
    x: &[f64],
    mut z: Vec<f64>,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let n = sys.n();
    let m = sys.m();
    let cap = 100 * (m + n + 1);
    let mut working: Vec<usize> = Vec::new();
    let scale = 1.0 + Norm::Linf.eval(x);

    for _ in 0..cap {
        let g: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
        // Multipliers of the equality-constrained subproblem.
        let mu: Vec<f64> = if working.is_empty() {
            Vec::new()
        } else {
            let aw = DMatrix::from_fn(working.len(), n, |i, j| sys.row(working[i])[j]);
            let gram = &aw * aw.transpose();
            let ag = &aw * DVector::from_column_slice(&g);
            let sol = linalg::lstsq(&gram, &ag);
            sol.iter().copied().collect()
        };
        // Step: minus the component of g orthogonal to the working rows.
        let rows: Vec<Vec<f64>> = working.iter().map(|&t| sys.row(t).to_vec()).collect();
        let q = linalg::row_space_basis(&rows, n);
        let step: Vec<f64> = if q.ncols() == n {
            vec![0.0; n]
        } else {
            let gv = DVector::from_column_slice(&g);
            let inside = &q * (q.transpose() * &gv);
            (0..n).map(|i| inside[i] - g[i]).collect()
        };
        if Norm::Linf.eval(&step) <= tol.conv_tol * scale {
            // Stationary on the working set; lambda = -mu.
            let (worst, pos) = mu.iter().enumerate().map(|(i, v)| (-v, i)).fold(
                (0.0f64, usize::MAX),
                |acc, cur| if cur.0 < acc.0 { cur } else { acc },
            );
            if pos == usize::MAX || worst >= -tol.conv_tol.sqrt() {
                return Ok(z);
            }
            working.remove(pos);
            continue;
        }
        let mut alpha = 1.0f64;
        let mut blocking: Option<usize> = None;
        for t in 0..m {
            if working.contains(&t) {
                continue;
            }
            let ap = dot(sys.row(t), &step);
            if ap > 1e-14 * scale {
                let room = (sys.rhs()[t] - dot(sys.row(t), &z)).max(0.0);
                let a = room / ap;
                if a < alpha {
                    alpha = a;
                    blocking = Some(t);
                }
            }
        }
        for (zi, s) in z.iter_mut().zip(&step) {
            *zi += alpha * s;
        }
        if let Some(t) = blocking {
            working.push(t);
        }
    }
    Err(Error::ConvergenceFailure {
        op: "point_to_polyhedron_distance",
        iterations: cap,
    })
}
