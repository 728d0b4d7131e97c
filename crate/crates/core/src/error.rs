use thiserror::Error;

/// Errors shared across the exact-computation modules.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Two series or tensors with incompatible variable count or cutoff.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An operation applied outside its mathematical domain
    /// (nonzero constant term under log, singular matrix, t <= 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Variable or basis index out of range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// A stated precondition failed; the message names the witness.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Malformed textual input (rationals, series lines, config files).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
