use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tol:e}: achieved estimate {achieved:e}")]
    Accuracy { tol: f64, achieved: f64 },

    #[error("grid configuration: {0}")]
    Configuration(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("bad input data: {0}")]
    Data(String),

    #[error("norm blow-up at step {step}: norm {norm:e} exceeds {limit:e}")]
    Stability { step: usize, norm: f64, limit: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("comparison failed: {0}")]
    Comparison(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
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
