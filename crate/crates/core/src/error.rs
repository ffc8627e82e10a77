use std::path::PathBuf;

/// Errors raised by the beamforming library and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: {context} (expected {expected}, got {actual})")]
    Dimension { context: &'static str, expected: usize, actual: usize },

    #[error("matrix is not positive definite: eigenvalue {eigenvalue:e} against largest {largest:e}")]
    Singular { eigenvalue: f64, largest: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("threshold detection failed: {0}")]
    Threshold(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
