use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("iteration anomaly at step {step}: functional dropped from {before} to {after}")]
    IterationAnomaly { step: usize, before: f64, after: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
