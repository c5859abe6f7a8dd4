use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("non-finite value at node {index} in {context}")]
    NonFinite { context: &'static str, index: usize },
    #[error("degenerate body: {0}")]
    Degenerate(String),
    #[error("origin is not an interior point")]
    OriginNotInterior,
    #[error("measure is concentrated on a closed hemisphere or not centered")]
    NotSpanning,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
