use qdeform_core::clock_shift::ClockShiftError;
use qdeform_core::matrix::MatrixError;
use qdeform_core::params::ParamsError;
use qdeform_core::weyl::WeylError;
use thiserror::Error;

/// Anything that ends a command with exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    ClockShift(#[from] ClockShiftError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
