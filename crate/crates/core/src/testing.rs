pub(crate) use crate::corpus::*;
use crate::model::{LinearSystem, Norm};

pub(crate) fn sys(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> LinearSystem {
    LinearSystem::new(rows, rhs, Norm::L2).unwrap()
}

pub(crate) fn assert_points(got: &[Vec<f64>], want: &[Vec<f64>], tol: f64) {
    assert_eq!(got.len(), want.len(), "got {got:?}, want {want:?}");
    for (g, w) in got.iter().zip(want) {
        for (a, b) in g.iter().zip(w) {
            assert!((a - b).abs() <= tol, "got {got:?}, want {want:?}");
        }
    }
}

pub(crate) fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}
