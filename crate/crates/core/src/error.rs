use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidArgument { field: &'static str, reason: String },

    #[error("design violates {bound} at {at}: value {value}")]
    DesignViolation {
        bound: &'static str,
        at: f64,
        value: f64,
    },

    #[error("sample is empty")]
    EmptySample,

    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },

    #[error(
        "regression discontinuity sample needs observations on both sides of 0 (left {left}, right {right})"
    )]
    OneSidedSample { left: usize, right: usize },

    #[error("{reps} replications are too few for alpha = {alpha} (quantile index {index} +/- {spread})")]
    TooFewReplications {
        reps: usize,
        alpha: f64,
        index: usize,
        spread: usize,
    },

    #[error("no critical value available for {0}")]
    MissingCriticalValue(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        field,
        reason: reason.into(),
    }
}
