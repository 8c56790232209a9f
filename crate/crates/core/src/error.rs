use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("singular or rank-deficient basis: {0}")]
    Singular(String),

    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("requested tolerance unreachable: {0}")]
    Tolerance(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("sampler starved: {0}")]
    Starvation(String),

    #[error("enumeration box too large: {0}")]
    BoxTooLarge(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
