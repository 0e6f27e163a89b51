use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: cannot read: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: cannot write: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    /// Malformed input at a known location (`line:column` or record number).
    #[error("{path}:{location}: {message}")]
    Parse {
        path: String,
        location: String,
        message: String,
    },

    /// Well-formed input that violates a model or trace invariant.
    #[error("{path}: {field}: {message}")]
    Validation {
        path: String,
        field: String,
        message: String,
    },

    #[error("cannot generate trace: {0}")]
    Generation(String),

    #[error("evaluation failed: {0}")]
    Evaluation(#[from] eviohmm::Error),

    #[error("report check failed: {0}")]
    Report(String),

    #[error("walkthrough mismatch: {0}")]
    Demo(String),
}

impl CliError {
    /// Process exit status: 1 for unusable input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Validation { .. } => 1,
            CliError::Generation(_) => 1,
            CliError::Write { .. }
            | CliError::Evaluation(_)
            | CliError::Report(_)
            | CliError::Demo(_) => 2,
        }
    }
}
