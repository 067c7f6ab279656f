//! System, norm and tolerance types, and the residual primitives every
//! other module builds on.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Norm on the variable space `R^n`.
///
/// The parameter space always carries
/// `||(A, b)|| = max_t max(||a_t||_*, |b_t|)`, which is not configurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    #[default]
    L2,
    Linf,
}

impl Norm {
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::Linf,
            Norm::L2 => Norm::L2,
            Norm::Linf => Norm::L1,
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Norm::L1 => x.iter().map(|v| v.abs()).sum(),
            Norm::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::Linf => x.iter().fold(0.0, |acc, v| acc.max(v.abs())),
        }
    }

    pub fn eval_dual(self, u: &[f64]) -> f64 {
        self.dual().eval(u)
    }

    pub fn name(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            other => Err(format!("unknown norm `{other}` (expected l1, l2 or linf)")),
        }
    }
}

/// Numeric thresholds shared by all algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Slack allowed when testing `Ax <= b`.
    pub feas_tol: f64,
    /// A row is active when `|a_t'x - b_t| <= active_tol`.
    pub active_tol: f64,
    /// Margin that realizes the strict inequalities of the D-system.
    pub strict_tol: f64,
    /// Two vertices closer than this (max-norm) are the same vertex.
    pub dedupe_tol: f64,
    /// Stopping tolerance of the min-norm-point and projection iterations.
    pub conv_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feas_tol: 1e-9,
            active_tol: 1e-9,
            strict_tol: 1e-9,
            dedupe_tol: 1e-8,
            conv_tol: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("feas_tol", self.feas_tol),
            ("active_tol", self.active_tol),
            ("strict_tol", self.strict_tol),
            ("dedupe_tol", self.dedupe_tol),
            ("conv_tol", self.conv_tol),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(name));
            }
        }
        Ok(())
    }
}

/// A value in `[0, +inf]`. Serialized as a JSON number, or the string
/// `"inf"` for `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedNonneg(f64);

impl ExtendedNonneg {
    pub const ZERO: ExtendedNonneg = ExtendedNonneg(0.0);
    pub const INFINITY: ExtendedNonneg = ExtendedNonneg(f64::INFINITY);

    /// Panics if `v` is negative or NaN.
    pub fn new(v: f64) -> Self {
        assert!(
            v >= 0.0,
            "ExtendedNonneg requires a value in [0, +inf], got {v}"
        );
        ExtendedNonneg(v)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn finite(self) -> Option<f64> {
        self.0.is_finite().then_some(self.0)
    }

    /// `1/0 = +inf`, `1/inf = 0`.
    pub fn recip(self) -> Self {
        ExtendedNonneg(if self.0 == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.0
        })
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Eq for ExtendedNonneg {}

impl PartialOrd for ExtendedNonneg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedNonneg {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for ExtendedNonneg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else if let Some(p) = f.precision() {
            write!(f, "{:.*}", p, self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl From<ExtendedNonneg> for f64 {
    fn from(v: ExtendedNonneg) -> f64 {
        v.0
    }
}

impl Serialize for ExtendedNonneg {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedNonneg {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = ExtendedNonneg;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Self::Value, E> {
                if v >= 0.0 {
                    Ok(ExtendedNonneg(v))
                } else {
                    Err(E::custom(format!("negative modulus {v}")))
                }
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                Ok(ExtendedNonneg(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                if v == "inf" {
                    Ok(ExtendedNonneg::INFINITY)
                } else {
                    Err(E::custom(format!("unexpected string `{v}`")))
                }
            }
        }

        deserializer.deserialize_any(ExtVisitor)
    }
}

/// The parametric system `{x in R^n : a_t'x <= b_t, t = 1..m}`.
///
/// Rows are kept exactly as given: zero rows and repeated rows are part of
/// the representation and change the moduli.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    norm: Norm,
}

impl LinearSystem {
    pub fn new(rows: Vec<Vec<f64>>, rhs: Vec<f64>, norm: Norm) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::EmptySystem);
        }
        let n = rows[0].len();
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "matrix row length",
                    expected: n,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("A"));
            }
        }
        if rhs.len() != rows.len() {
            return Err(Error::DimensionMismatch {
                context: "right-hand side length",
                expected: rows.len(),
                actual: rhs.len(),
            });
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("b"));
        }
        Ok(LinearSystem { rows, rhs, norm })
    }

    /// Number of constraints.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.rows[t]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn with_norm(&self, norm: Norm) -> Self {
        LinearSystem {
            norm,
            ..self.clone()
        }
    }

    /// `(lambda A, lambda b)`; same feasible set, different representation.
    pub fn scaled(&self, lambda: f64) -> Self {
        LinearSystem {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|v| v * lambda).collect())
                .collect(),
            rhs: self.rhs.iter().map(|v| v * lambda).collect(),
            norm: self.norm,
        }
    }

    /// `a_t'x - b_t`.
    pub fn slack(&self, t: usize, x: &[f64]) -> f64 {
        dot(&self.rows[t], x) - self.rhs[t]
    }

    /// `||(Ax - b)_+||_inf`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        (0..self.m()).fold(0.0, |acc, t| acc.max(self.slack(t, x)))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn vector_norm(x: &[f64], norm: Norm) -> f64 {
    norm.eval(x)
}

pub fn dual_norm(u: &[f64], norm: Norm) -> f64 {
    norm.eval_dual(u)
}

/// Parameter-space distance `max_t max(||a1_t - a2_t||_*, |b1_t - b2_t|)`.
pub fn param_distance(p1: &LinearSystem, p2: &LinearSystem, norm: Norm) -> Result<f64> {
    if p1.m() != p2.m() {
        return Err(Error::DimensionMismatch {
            context: "param_distance rows",
            expected: p1.m(),
            actual: p2.m(),
        });
    }
    if p1.n() != p2.n() {
        return Err(Error::DimensionMismatch {
            context: "param_distance columns",
            expected: p1.n(),
            actual: p2.n(),
        });
    }
    let mut best = 0.0f64;
    let mut diff = vec![0.0; p1.n()];
    for t in 0..p1.m() {
        for (d, (u, v)) in diff.iter_mut().zip(p1.row(t).iter().zip(p2.row(t))) {
            *d = u - v;
        }
        best = best
            .max(dual_norm(&diff, norm))
            .max((p1.rhs[t] - p2.rhs[t]).abs());
    }
    Ok(best)
}

/// `||(Ax - b)_+||_inf`, the distance from `b` to the set of right-hand
/// sides that make `x` feasible.
pub fn rhs_residual(sys: &LinearSystem, x: &[f64]) -> f64 {
    sys.residual(x)
}

/// Distance from `(A, b)` to the parameters that make `x` feasible:
/// `||(Ax - b)_+||_inf / (||x|| + 1)`.
pub fn inverse_image_distance(sys: &LinearSystem, x: &[f64]) -> f64 {
    sys.residual(x) / (vector_norm(x, sys.norm()) + 1.0)
}
