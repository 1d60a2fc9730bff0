use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {point:?} lies outside the space domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("non-finite coordinate in {0:?}")]
    NonFinite(Vec<f64>),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("gauge argument must be finite and nonnegative, got {0}")]
    GaugeDomain(f64),

    #[error("no dominated point in the image of {point:?}")]
    NoDominatedPoint { point: Vec<f64> },

    #[error("no dominating point in the image of {point:?}")]
    NoDominatingPoint { point: Vec<f64> },

    #[error("trace too short: need at least {needed} rows, got {got}")]
    TraceTooShort { needed: usize, got: usize },

    #[error("limit rule `{rule}` is undefined on sequence {sequence}")]
    LimUndefined { rule: String, sequence: String },
}

pub type Result<T> = std::result::Result<T, Error>;
