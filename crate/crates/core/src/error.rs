use thiserror::Error;

/// Errors raised by the library. Out-of-range bound thresholds are not
/// errors; they are reported as notes on the returned value.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("space too large to enumerate: {count} points exceeds cap {cap}")]
    TooLargeToEnumerate { count: u128, cap: u64 },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid event: {0}")]
    InvalidEvent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("tuple budget exceeded: {count} tuples > {budget}")]
    TupleBudgetExceeded { count: u128, budget: u64 },

    #[error("solver did not converge after {iterations} iterations (gap {gap:e}, best value {value})")]
    SolverNotConverged {
        iterations: usize,
        gap: f64,
        value: f64,
        best: Vec<f64>,
    },

    #[error("dual certificate failed: min over atoms {min_linear} < |s|^2 - gap = {threshold}")]
    DualCheckFailed { min_linear: f64, threshold: f64 },

    #[error("integrability condition fails: double integral of exp(h) = {integral} > 2")]
    IntegrabilityFailed { integral: f64 },

    #[error("moment condition fails: E exp(X/{k0}) = {value} > 2")]
    MomentConditionFailed { k0: f64, value: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("evaluation failed at point {point:?}: {source}")]
    AtPoint { point: Vec<usize>, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
