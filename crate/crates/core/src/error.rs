use thiserror::Error;

/// Errors shared by every pipeline in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Exact arithmetic ran out of tracked digits. The payload names the
    /// operation and, when known, the truncation order that would suffice.
    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("degenerate map: resultant vanishes")]
    Degenerate,

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// A cross-check that must hold by construction failed; indicates a bug.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
