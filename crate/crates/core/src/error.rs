use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A block specification that does not describe a domain.
    #[error("invalid block specification: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A request that would exceed a configured size or cell budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// An iterative method failed to converge.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// A caller-checked precondition turned out to be violated mid-computation.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Two computations that must agree mathematically did not.
    #[error("inconsistent state: {0}")]
    InconsistentState(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
