use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {levels} levels")]
    NotConverged { estimate: f64, error: f64, levels: usize },

    #[error("moment diverges: {0}")]
    Divergent(String),

    #[error("basis index {0} is not admissible at the requested weight")]
    Inadmissible(String),

    #[error("term {index} of the input is not square integrable: {reason}")]
    NonIntegrableTerm { index: usize, reason: String },

    #[error("s = {s} is at or above the threshold {threshold}; use a divergence witness instead")]
    AboveThreshold { s: f64, threshold: f64 },

    #[error("s = {s} is below the threshold {threshold}; no divergence witness exists there")]
    BelowThreshold { s: f64, threshold: f64 },

    #[error(
        "stated threshold {threshold} is not attained: admissible index {index} has divergent weighted norm at s = {s} ({reason})"
    )]
    ThresholdNotAttained { threshold: f64, s: f64, index: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
