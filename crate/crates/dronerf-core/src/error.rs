use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's preconditions.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Input is structurally valid but degenerate (all-zero frame,
    /// empty burst mask, zero standard deviation, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A configuration cannot be realised (burst longer than a frame,
    /// unreachable class balance, incompatible profile, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Stored data is malformed: bad magic/version, truncation,
    /// checksum failure, schema violations.
    #[error("format error: {0}")]
    Format(String),

    /// Tensor or frame shapes do not line up.
    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: String, actual: String },

    /// Numerical failure at runtime (NaN loss, non-finite output).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(expected: impl Into<String>, actual: impl Into<String>) -> Self {
        Error::Shape {
            expected: expected.into(),
            actual: actual.into(),
        }
    }
}
