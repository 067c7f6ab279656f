use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("system must have at least one row and one column")]
    EmptySystem,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("tolerance `{0}` must be strictly positive and finite")]
    InvalidTolerance(&'static str),

    #[error("point is infeasible (residual {residual:e})")]
    InfeasiblePoint { residual: f64 },

    #[error("the system has no feasible point")]
    InfeasibleSystem,

    #[error("numerical failure in {op}: {detail}")]
    NumericalFailure { op: &'static str, detail: String },

    #[error("{op} did not converge within {iterations} iterations")]
    ConvergenceFailure { op: &'static str, iterations: usize },

    #[error("{count} candidate active indices exceed the enumeration limit of {limit}")]
    TooManyActive { count: usize, limit: usize },

    #[error("the requested face is empty")]
    EmptyFace,

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("full-perturbation estimates require a bounded feasible set")]
    UnboundedFullMode,
}
