use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {requested} exceeds the direction-number table ({available} dimensions)")]
    DimensionExceedsTable { requested: usize, available: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("moment generating function undefined: |beta + u| = {value} exceeds alpha = {alpha}")]
    MgfDomain { value: f64, alpha: f64 },

    #[error("Esscher equation has no root in the admissible domain")]
    NoEsscherRoot,

    #[error("inverse CDF construction failed: {0}")]
    InverseCdfBuild(String),

    #[error("degenerate weight matrix: {0}")]
    DegenerateWeights(String),

    #[error("non-finite gradient entry at coordinate {0}")]
    NonFiniteGradient(usize),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("integrand has zero total variance")]
    ZeroVariance,

    #[error("invalid sample size: {0}")]
    SampleSize(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
