use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("improper transfer function: numerator degree {num} exceeds denominator degree {den}")]
    ImproperTransfer { num: usize, den: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("pintle position {theta} qc outside travel [0, {max}]")]
    OutOfTravel { theta: f64, max: f64 },

    #[error("plant aborted at t = {time:.4} s: {reason}")]
    PlantAbort { time: f64, reason: String },

    #[error("W_e is not strictly positive real: {0}")]
    SprGate(String),

    #[error("design rejected: {0}")]
    Design(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

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

pub type Result<T> = std::result::Result<T, Error>;
