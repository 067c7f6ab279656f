//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are tiny (tens of rows), so a full tableau is kept and every
//! pivot updates all of it. Pivot selection depends only on the input, so
//! identical problems take identical paths.

use crate::error::{Error, Result};
use crate::model::Tolerances;

/// Entries smaller than this are treated as zero in pivot selection.
const PIVOT_EPS: f64 = 1e-11;
const BLAND_AFTER: usize = 50;

/// `minimize c'z  s.t.  Gz <= h,  Ez = f,  lo <= z <= hi`.
///
/// Variables are free unless bounded with [`LpProblem::bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub ineq_rows: Vec<Vec<f64>>,
    pub ineq_rhs: Vec<f64>,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        let k = objective.len();
        LpProblem {
            objective,
            ineq_rows: Vec::new(),
            ineq_rhs: Vec::new(),
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); k],
        }
    }

    /// Pure feasibility problem in `k` variables.
    pub fn feasibility(k: usize) -> Self {
        Self::new(vec![0.0; k])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn leq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.ineq_rows.push(row);
        self.ineq_rhs.push(rhs);
        self
    }

    pub fn geq(self, row: Vec<f64>, rhs: f64) -> Self {
        let neg = row.iter().map(|v| -v).collect();
        self.leq(neg, -rhs)
    }

    pub fn equal(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn bound(mut self, var: usize, lo: f64, hi: f64) -> Self {
        self.bounds[var] = (lo, hi);
        self
    }

    pub fn nonneg(mut self, var: usize) -> Self {
        self.bounds[var].0 = 0.0;
        self
    }

    fn validate(&self) -> Result<()> {
        let k = self.num_vars();
        let check_rows = |rows: &[Vec<f64>], rhs: &[f64], ctx: &'static str| -> Result<()> {
            if rows.len() != rhs.len() {
                return Err(Error::DimensionMismatch {
                    context: ctx,
                    expected: rows.len(),
                    actual: rhs.len(),
                });
            }
            for row in rows {
                if row.len() != k {
                    return Err(Error::DimensionMismatch {
                        context: ctx,
                        expected: k,
                        actual: row.len(),
                    });
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite(ctx));
                }
            }
            if rhs.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(ctx));
            }
            Ok(())
        };
        check_rows(&self.ineq_rows, &self.ineq_rhs, "lp inequality rows")?;
        check_rows(&self.eq_rows, &self.eq_rhs, "lp equality rows")?;
        if self.bounds.len() != k {
            return Err(Error::DimensionMismatch {
                context: "lp bounds",
                expected: k,
                actual: self.bounds.len(),
            });
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("lp objective"));
        }
        if self.bounds.iter().any(|(lo, hi)| {
            lo.is_nan() || hi.is_nan() || *lo == f64::INFINITY || *hi == f64::NEG_INFINITY
        }) {
            return Err(Error::NonFinite("lp bounds"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Lagrange multipliers certifying optimality:
/// `c + G'ineq + E'eq - lower + upper = 0` with `ineq, lower, upper >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub ineq: Vec<f64>,
    pub eq: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl DualCertificate {
    /// Max-norm of the stationarity defect.
    pub fn stationarity_residual(&self, p: &LpProblem) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..p.num_vars() {
            let mut g = p.objective[j] - self.lower[j] + self.upper[j];
            for (row, y) in p.ineq_rows.iter().zip(&self.ineq) {
                g += row[j] * y;
            }
            for (row, y) in p.eq_rows.iter().zip(&self.eq) {
                g += row[j] * y;
            }
            worst = worst.max(g.abs());
        }
        worst
    }

    /// Max over constraints of `|multiplier * slack|`.
    pub fn complementarity_residual(&self, p: &LpProblem, z: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for ((row, h), y) in p.ineq_rows.iter().zip(&p.ineq_rhs).zip(&self.ineq) {
            let slack = h - dot(row, z);
            worst = worst.max((y * slack).abs());
        }
        for (j, (lo, hi)) in p.bounds.iter().enumerate() {
            if lo.is_finite() {
                worst = worst.max((self.lower[j] * (z[j] - lo)).abs());
            }
            if hi.is_finite() {
                worst = worst.max((self.upper[j] * (hi - z[j])).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub z: Option<Vec<f64>>,
    pub objective_value: Option<f64>,
    pub certificate: Option<DualCertificate>,
}

impl LpResult {
    fn without_point(status: LpStatus) -> Self {
        LpResult {
            status,
            z: None,
            objective_value: None,
            certificate: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// How an original variable is expressed through nonnegative columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `z = lo + x[col]`
    Lower { col: usize, lo: f64 },
    /// `z = hi - x[col]`
    Upper { col: usize, hi: f64 },
    /// `z = x[pos] - x[neg]`
    Free { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Leq,
    Eq,
}

struct Tableau {
    /// `rows x cols` coefficients, row-major, followed by the rhs column.
    data: Vec<f64>,
    rows: usize,
    cols: usize,
    /// Reduced costs, with the negated objective value in the last slot.
    cost: Vec<f64>,
    basis: Vec<usize>,
    /// Columns that may never enter (artificials during phase 2).
    blocked: Vec<bool>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width() + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width();
        let inv = 1.0 / self.at(pr, pc);
        for v in &mut self.data[pr * w..(pr + 1) * w] {
            *v *= inv;
        }
        self.data[pr * w + pc] = 1.0;
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let factor = row[pc];
            if factor != 0.0 {
                for (v, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= factor * p;
                }
                row[pc] = 0.0;
            }
        }
        let factor = self.cost[pc];
        if factor != 0.0 {
            for (v, p) in self.cost.iter_mut().zip(pivot_row.iter()) {
                *v -= factor * p;
            }
            self.cost[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Runs Bland-rule simplex on the current cost row. Ratio ties go to the
    /// largest pivot element until `BLAND_AFTER` consecutive degenerate
    /// pivots, then to the lowest basis index.
    /// Returns `Ok(false)` when a descent ray exists.
    fn optimize(&mut self, iterations: &mut usize, cap: usize) -> Result<bool> {
        let mut degenerate = 0usize;
        loop {
            let entering = (0..self.cols).find(|&j| !self.blocked[j] && self.cost[j] < -PIVOT_EPS);
            let Some(pc) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, pc);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tied = ratio <= br + 1e-14 * (1.0 + br.abs());
                            let better_tie = if degenerate < BLAND_AFTER {
                                a > self.at(bi, pc)
                            } else {
                                self.basis[i] < self.basis[bi]
                            };
                            if ratio < br - 1e-14 * (1.0 + br.abs()) || (tied && better_tie) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((pr, step)) = leave else {
                return Ok(false);
            };
            degenerate = if step == 0.0 { degenerate + 1 } else { 0 };
            *iterations += 1;
            if *iterations > cap {
                return Err(Error::NumericalFailure {
                    op: "lp_solve",
                    detail: format!("simplex exceeded the iteration cap of {cap}"),
                });
            }
            self.pivot(pr, pc);
        }
    }
}

/// Solves `p`. Deterministic: identical inputs give bit-identical results.
pub fn lp_solve(p: &LpProblem, tol: &Tolerances) -> Result<LpResult> {
    p.validate()?;
    let k = p.num_vars();
    if p.bounds.iter().any(|(lo, hi)| lo > hi) {
        return Ok(LpResult::without_point(LpStatus::Infeasible));
    }

    // Map variables onto nonnegative columns.
    let mut maps = Vec::with_capacity(k);
    let mut nx = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &p.bounds {
        if lo.is_finite() {
            maps.push(VarMap::Lower { col: nx, lo });
            if hi.is_finite() {
                bound_rows.push((nx, hi - lo));
            }
            nx += 1;
        } else if hi.is_finite() {
            maps.push(VarMap::Upper { col: nx, hi });
            nx += 1;
        } else {
            maps.push(VarMap::Free {
                pos: nx,
                neg: nx + 1,
            });
            nx += 2;
        }
    }

    let transform = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut out = vec![0.0; nx];
        let mut rhs = rhs;
        for (j, map) in maps.iter().enumerate() {
            let g = row[j];
            match *map {
                VarMap::Lower { col, lo } => {
                    out[col] += g;
                    rhs -= g * lo;
                }
                VarMap::Upper { col, hi } => {
                    out[col] -= g;
                    rhs -= g * hi;
                }
                VarMap::Free { pos, neg } => {
                    out[pos] += g;
                    out[neg] -= g;
                }
            }
        }
        (out, rhs)
    };

    let mut std_rows: Vec<(Vec<f64>, f64, RowKind)> = Vec::new();
    for (row, &h) in p.ineq_rows.iter().zip(&p.ineq_rhs) {
        let (r, h) = transform(row, h);
        std_rows.push((r, h, RowKind::Leq));
    }
    for (row, &f) in p.eq_rows.iter().zip(&p.eq_rhs) {
        let (r, f) = transform(row, f);
        std_rows.push((r, f, RowKind::Eq));
    }
    for &(col, width) in &bound_rows {
        let mut r = vec![0.0; nx];
        r[col] = 1.0;
        std_rows.push((r, width, RowKind::Leq));
    }
    let (cost_x, _) = transform(&p.objective, 0.0);

    let rows = std_rows.len();
    let n_slack = std_rows.iter().filter(|r| r.2 == RowKind::Leq).count();
    let mut flipped = vec![false; rows];
    let mut needs_art = vec![false; rows];
    for (i, (_, rhs, kind)) in std_rows.iter().enumerate() {
        flipped[i] = *rhs < 0.0;
        needs_art[i] = *kind == RowKind::Eq || flipped[i];
    }
    let n_art = needs_art.iter().filter(|&&a| a).count();
    let cols = nx + n_slack + n_art;
    let width = cols + 1;

    let mut tab = Tableau {
        data: vec![0.0; rows * width],
        rows,
        cols,
        cost: vec![0.0; width],
        basis: vec![0; rows],
        blocked: vec![false; cols],
    };
    // Column holding `+e_i` in the initial tableau, used to read duals.
    let mut identity_col = vec![0usize; rows];
    let mut slack_next = nx;
    let mut art_next = nx + n_slack;
    for (i, (r, rhs, kind)) in std_rows.iter().enumerate() {
        let sign = if flipped[i] { -1.0 } else { 1.0 };
        let base = i * width;
        for (j, v) in r.iter().enumerate() {
            tab.data[base + j] = sign * v;
        }
        tab.data[base + cols] = sign * rhs;
        if *kind == RowKind::Leq {
            tab.data[base + slack_next] = sign;
            if !needs_art[i] {
                tab.basis[i] = slack_next;
                identity_col[i] = slack_next;
            }
            slack_next += 1;
        }
        if needs_art[i] {
            tab.data[base + art_next] = 1.0;
            tab.basis[i] = art_next;
            identity_col[i] = art_next;
            art_next += 1;
        }
    }

    let cap = (10 * (rows + k).pow(2)).max(100);
    let mut iterations = 0usize;

    // Phase 1: minimize the sum of artificials.
    if n_art > 0 {
        for j in nx + n_slack..cols {
            tab.cost[j] = 1.0;
        }
        for i in 0..rows {
            if tab.basis[i] >= nx + n_slack {
                for j in 0..width {
                    tab.cost[j] -= tab.data[i * width + j];
                }
            }
        }
        if !tab.optimize(&mut iterations, cap)? {
            return Err(Error::NumericalFailure {
                op: "lp_solve",
                detail: "phase 1 reported a descent ray".into(),
            });
        }
        let infeasibility = -tab.cost[cols];
        if infeasibility > tol.feas_tol {
            return Ok(LpResult::without_point(LpStatus::Infeasible));
        }
        // Drive zero-level artificials out of the basis where possible;
        // rows where that fails are redundant and stay inert.
        for i in 0..rows {
            if tab.basis[i] >= nx + n_slack {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..nx + n_slack {
                    let a = tab.at(i, j).abs();
                    if a > 1e-9 && best.is_none_or(|(_, b)| a > b) {
                        best = Some((j, a));
                    }
                }
                if let Some((j, _)) = best {
                    tab.pivot(i, j);
                }
            }
        }
        for j in nx + n_slack..cols {
            tab.blocked[j] = true;
        }
    }

    // Phase 2.
    tab.cost.iter_mut().for_each(|v| *v = 0.0);
    tab.cost[..nx].copy_from_slice(&cost_x);
    for i in 0..rows {
        let cb = if tab.basis[i] < nx {
            cost_x[tab.basis[i]]
        } else {
            0.0
        };
        if cb != 0.0 {
            for j in 0..width {
                tab.cost[j] -= cb * tab.data[i * width + j];
            }
        }
    }
    if !tab.optimize(&mut iterations, cap)? {
        return Ok(LpResult::without_point(LpStatus::Unbounded));
    }

    let mut x = vec![0.0; cols];
    for i in 0..rows {
        x[tab.basis[i]] = tab.rhs(i).max(0.0);
    }
    let z: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Lower { col, lo } => lo + x[col],
            VarMap::Upper { col, hi } => hi - x[col],
            VarMap::Free { pos, neg } => x[pos] - x[neg],
        })
        .collect();
    let objective_value = dot(&p.objective, &z);

    // y_i = -reduced cost of the identity column, in original orientation.
    let row_dual: Vec<f64> = (0..rows)
        .map(|i| {
            let y = -tab.cost[identity_col[i]];
            if flipped[i] {
                -y
            } else {
                y
            }
        })
        .collect();
    let n_ineq = p.ineq_rows.len();
    let n_eq = p.eq_rows.len();
    let ineq: Vec<f64> = row_dual[..n_ineq].iter().map(|y| (-y).max(0.0)).collect();
    let eq: Vec<f64> = row_dual[n_ineq..n_ineq + n_eq].iter().map(|y| -y).collect();
    let mut lower = vec![0.0; k];
    let mut upper = vec![0.0; k];
    for j in 0..k {
        let mut g = p.objective[j];
        for (row, y) in p.ineq_rows.iter().zip(&ineq) {
            g += row[j] * y;
        }
        for (row, y) in p.eq_rows.iter().zip(&eq) {
            g += row[j] * y;
        }
        let (lo, hi) = p.bounds[j];
        if lo.is_finite() && g > 0.0 {
            lower[j] = g;
        } else if hi.is_finite() && g < 0.0 {
            upper[j] = -g;
        }
    }

    Ok(LpResult {
        status: LpStatus::Optimal,
        z: Some(z),
        objective_value: Some(objective_value),
        certificate: Some(DualCertificate {
            ineq,
            eq,
            lower,
            upper,
        }),
    })
}

/// True iff `{z : Gz <= h, Ez = f}` in `R^k` has a point (within
/// `feas_tol`). No constraints means the whole space.
pub fn lp_feasible(
    k: usize,
    ineq: (&[Vec<f64>], &[f64]),
    eq: (&[Vec<f64>], &[f64]),
    tol: &Tolerances,
) -> Result<bool> {
    if ineq.0.is_empty() && eq.0.is_empty() {
        return Ok(true);
    }
    let problem = LpProblem {
        objective: vec![0.0; k],
        ineq_rows: ineq.0.to_vec(),
        ineq_rhs: ineq.1.to_vec(),
        eq_rows: eq.0.to_vec(),
        eq_rhs: eq.1.to_vec(),
        bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); k],
    };
    Ok(lp_solve(&problem, tol)?.status == LpStatus::Optimal)
}
