use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("singular argument: {0}")]
    SingularArgument(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("linear solve failed: {message} (condition estimate {condition:.3e})")]
    Solver { message: String, condition: f64 },
    #[error("missing dependency: {0}")]
    Dependency(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
