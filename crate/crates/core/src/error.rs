use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("instance must contain at least one interval")]
    EmptyInstance,

    #[error("interval {index}: bounds must be finite (got [{lower}, {upper}])")]
    NonFinite {
        index: usize,
        lower: f64,
        upper: f64,
    },

    #[error("interval {index}: lower bound {lower} exceeds upper bound {upper}")]
    InvertedInterval {
        index: usize,
        lower: f64,
        upper: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("sign values must be -1 or +1 (got {0})")]
    InvalidSign(i8),

    #[error("enumeration width exceeds limit: width {width} > {limit}")]
    WidthExceeded { width: usize, limit: usize },

    #[error("instance too large for exhaustive search: n = {n} > {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid generator spec: {0}")]
    Spec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
