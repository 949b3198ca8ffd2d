use thiserror::Error;

/// Errors produced by the simulation and diagnostics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A specification violated one of its construction invariants.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// An argument was outside the accepted range for the operation.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value exceeded the overflow limit (or became non-finite) at `index`.
    #[error("overflow at index {index}: {what}")]
    Overflow { index: usize, what: String },

    /// Input too degenerate for the requested estimate.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
