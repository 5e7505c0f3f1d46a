use std::path::PathBuf;

use thiserror::Error;

/// Everything that ends a run with exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] timeflow_core::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn file(path: &std::path::Path, message: impl ToString) -> Self {
        CliError::File { path: path.to_path_buf(), message: message.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;
