use thiserror::Error;

/// Structural errors raised by the algebra and verification layers.
///
/// Failed verifications are never errors: they are reported as nonzero
/// residuals in a [`crate::report::Report`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("chart mismatch: expected {expected} variables, found {found}")]
    ChartMismatch { expected: usize, found: usize },

    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Dimension { op, detail: detail.into() }
}
