use thiserror::Error;

/// Errors raised by the transform, estimators and oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("scale a = {a} is below the grid resolution; need n >= {min_n} at extent {extent}")]
    ScaleOutOfRange { a: f64, min_n: usize, extent: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by user input rather than by the computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parse(_) | Error::ScaleOutOfRange { .. } | Error::Domain(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
