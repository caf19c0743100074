use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The kinematics or load cannot form an admissible work loop.
    #[error("inadmissible: {0}")]
    Inadmissible(String),

    /// Two signals that must share a time grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A numerical procedure did not reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn inadmissible(msg: impl Into<String>) -> Self {
        Error::Inadmissible(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
