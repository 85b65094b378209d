use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("equity violated: class sizes {larger} and {smaller} differ by more than one")]
    EquityViolation { larger: usize, smaller: usize },

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("not a proper equitable coloring: {0}")]
    NotAnEqcol(String),

    #[error("graph with {n} vertices exceeds the brute-force limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
