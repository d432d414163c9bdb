use thiserror::Error;

/// Errors raised by the hedging library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("confidence level {0} leaves an empty tail")]
    DegenerateTail(f64),

    #[error("{0} requires uniform demand")]
    NotUniform(&'static str),

    #[error("{0} is not profitable, its confidence level is undefined")]
    LevelAbsent(&'static str),

    #[error("no sign change of the profit difference on [{lo}, {hi}] ({preferred} preferred throughout)")]
    NoSignChange {
        lo: f64,
        hi: f64,
        preferred: &'static str,
    },

    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
