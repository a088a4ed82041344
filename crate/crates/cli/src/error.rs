use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}:{line}:{column}: at `{key}`: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        key: String,
        message: String,
    },
    #[error("invalid `{key}`: {message}")]
    Validation { key: String, message: String },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Scatter(#[from] nls_scatter::Error),
}

impl CliError {
    /// Process exit status: 2 for bad input, 3 when the computation itself
    /// failed, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Read { .. } | Self::Parse { .. } | Self::Validation { .. } => 2,
            Self::Scatter(nls_scatter::Error::InvalidSweep(_) | nls_scatter::Error::Model(_)) => 2,
            Self::Scatter(_) => 3,
            Self::Write { .. } | Self::Csv(_) => 1,
        }
    }
}
