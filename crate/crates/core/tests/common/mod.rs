#![allow(dead_code)]

use linstab::{LinearSystem, Norm};
use proptest::prelude::*;

/// A system `Ax <= b` together with a feasible point `x0`; roughly half the
/// rows are tight at `x0`.
#[derive(Debug, Clone)]
pub struct Seeded {
    pub sys: LinearSystem,
    pub x0: Vec<f64>,
}

fn round(v: f64) -> f64 {
    (v * 4.0).round() / 4.0
}

pub fn seeded_system(
    n: std::ops::RangeInclusive<usize>,
    m: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Seeded> {
    (n, m).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(prop::collection::vec(-2.0f64..2.0, n), m),
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.5], m),
        )
            .prop_map(|(rows, x0, slack)| {
                // Quarter-integer data keeps the tight rows exactly tight.
                let rows: Vec<Vec<f64>> = rows
                    .into_iter()
                    .map(|r| r.into_iter().map(round).collect())
                    .collect();
                let x0: Vec<f64> = x0.into_iter().map(round).collect();
                let rhs = rows
                    .iter()
                    .zip(&slack)
                    .map(|(r, s)| r.iter().zip(&x0).map(|(a, x)| a * x).sum::<f64>() + round(*s))
                    .collect();
                Seeded {
                    sys: LinearSystem::new(rows, rhs, Norm::L2).unwrap(),
                    x0,
                }
            })
    })
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}
