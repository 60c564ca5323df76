use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Some objective has no spread left after every nadir fallback.
    #[error("degenerate population: objective(s) {objectives:?} have zero range (ideal {ideal:?}, nadir {nadir:?})")]
    DegeneratePopulation {
        objectives: Vec<usize>,
        ideal: Vec<f64>,
        nadir: Vec<f64>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
