//! Small dense helpers on row-major `Vec<Vec<f64>>` data.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff for rank decisions.
pub(crate) const RANK_RTOL: f64 = 1e-10;

/// Solves the square system `M x = rhs` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `1e-10` times the
/// largest entry of `M`.
pub(crate) fn solve_square(m: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(*b);
            r
        })
        .collect();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let (piv, best) = (col..n)
            .map(|i| (i, a[i][col].abs()))
            .fold(
                (col, -1.0),
                |acc, cur| if cur.1 > acc.1 { cur } else { acc },
            );
        if best <= 1e-10 * scale {
            return None;
        }
        a.swap(col, piv);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            if f != 0.0 {
                for j in col..=n {
                    a[i][j] -= f * a[col][j];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = a[i][n];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

pub(crate) fn to_matrix(rows: &[Vec<f64>], ncols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

/// Orthonormal basis (as columns of an `n x r` matrix) of the span of the
/// given row vectors, with a scale-aware rank cutoff.
pub(crate) fn row_space_basis(rows: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    if rows.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    let a = to_matrix(rows, n);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return DMatrix::zeros(n, 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] >= RANK_RTOL * sigma_max)
        .collect();
    DMatrix::from_fn(n, keep.len(), |i, j| v_t[(keep[j], i)])
}

#[cfg(test)]
pub(crate) fn rank(rows: &[Vec<f64>], n: usize) -> usize {
    row_space_basis(rows, n).ncols()
}

/// Minimum-norm least-squares solution of `M x = rhs`.
pub(crate) fn lstsq(m: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let svd = m.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = (RANK_RTOL * sigma_max).max(f64::MIN_POSITIVE);
    svd.solve(rhs, eps)
        .expect("both singular vector sets computed")
}
