//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on inputs was violated (bad dimensions, out-of-range
    /// entries, malformed configs).
    #[error("validation: {0}")]
    Validation(String),

    /// A numeric procedure failed to converge or overflowed; carries a
    /// human-readable residual report.
    #[error("numeric: {0}")]
    Numeric(String),

    /// An input left the mathematical domain of an operation (e.g. a zero
    /// probability where strict positivity is required).
    #[error("domain: {0}")]
    Domain(String),

    /// The requested analytic check is not available for this input family.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
