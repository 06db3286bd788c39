use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("numeric error: {message} (last estimate {last_estimate})")]
    Numeric { message: String, last_estimate: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("outside the domain of convergence: {0}")]
    Domain(String),

    #[error("pole: |1 + w| = {magnitude:e} is below tolerance {tol:e}")]
    Pole { magnitude: f64, tol: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, last_estimate: f64) -> Self {
        Error::Numeric {
            message: msg.into(),
            last_estimate,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
