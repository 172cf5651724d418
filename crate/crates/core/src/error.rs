use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sample-size search ran past its cap without finding an admissible value.
    #[error("capacity error: no admissible sample size below {cap}")]
    Capacity { cap: u64 },

    /// An iterative numerical routine did not converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A constraint evaluator failed.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// An experiment configuration could not be parsed or resolved.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
