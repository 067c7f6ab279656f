//! The reference systems used throughout the tests, the CLI fixtures and
//! the Python smoke test. All use the Euclidean norm.

use crate::model::{LinearSystem, Norm};

fn build(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> LinearSystem {
    LinearSystem::new(rows, rhs, Norm::L2).expect("corpus systems are well formed")
}

/// `{x1 <= 1, x1/r + x2/r^2 <= 1/r - 1/r^2, x2 <= 0, -x1 - x2 <= 0}`.
/// Its feasible set is the triangle `conv{(0,0), (1-1/r,0), (1,-1)}`.
pub fn example1_r(r: f64) -> LinearSystem {
    build(
        vec![
            vec![1.0, 0.0],
            vec![1.0 / r, 1.0 / (r * r)],
            vec![0.0, 1.0],
            vec![-1.0, -1.0],
        ],
        vec![1.0, 1.0 / r - 1.0 / (r * r), 0.0, 0.0],
    )
}

/// Limit of [`example1_r`] as `r -> inf`; the second row becomes `0'x <= 0`.
pub fn example1_limit() -> LinearSystem {
    build(
        vec![
            vec![1.0, 0.0],
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, -1.0],
        ],
        vec![1.0, 0.0, 0.0, 0.0],
    )
}

/// [`example1_r`] without its first row.
pub fn example2_r(r: f64) -> LinearSystem {
    build(
        vec![
            vec![1.0 / r, 1.0 / (r * r)],
            vec![0.0, 1.0],
            vec![-1.0, -1.0],
        ],
        vec![1.0 / r - 1.0 / (r * r), 0.0, 0.0],
    )
}

/// Limit of [`example2_r`]; an unbounded cone.
pub fn example2_limit() -> LinearSystem {
    build(
        vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
        vec![0.0, 0.0, 0.0],
    )
}

/// `{x1 <= 1, -x1 <= 0}` in `R^2`: a strip without extreme points.
pub fn strip() -> LinearSystem {
    build(vec![vec![1.0, 0.0], vec![-1.0, 0.0]], vec![1.0, 0.0])
}

/// `{x <= 0}` in `R^1`.
pub fn half_line() -> LinearSystem {
    build(vec![vec![1.0]], vec![0.0])
}

/// `{0'x <= 1, 0'x <= 2}` in `R^2`.
pub fn full_space() -> LinearSystem {
    build(vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![1.0, 2.0])
}

/// Every named system, with a label.
pub fn all() -> Vec<(&'static str, LinearSystem)> {
    vec![
        ("example1_r3", example1_r(3.0)),
        ("example1_limit", example1_limit()),
        ("example2_r3", example2_r(3.0)),
        ("example2_limit", example2_limit()),
        ("strip", strip()),
        ("half_line", half_line()),
        ("full_space", full_space()),
    ]
}
