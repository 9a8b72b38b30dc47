use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tat_core::Error),

    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl CliError {
    /// Exit code: 2 for rejected input, 1 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> CliError {
    CliError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}
