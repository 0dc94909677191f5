use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error at byte offset {offset}: {reason}")]
    Format { offset: u64, reason: String },

    #[error("simulation error: {0}")]
    Simulation(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    Divergence { epoch: usize, loss: f64 },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn format(offset: u64, reason: impl Into<String>) -> Self {
        Error::Format {
            offset,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than I/O or numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Format { .. }
                | Error::Simulation(_)
                | Error::Parameter(_)
                | Error::Unsupported(_)
                | Error::Shape(_)
                | Error::Manifest(_)
                | Error::Validation(_)
                | Error::Json(_)
        )
    }

    /// Process exit status for the command line: 2 for invalid input, 3 for
    /// I/O failures, 4 for numeric divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Divergence { .. } => 4,
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}
