use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failure categories surfaced by the CLI, each with its own exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error(transparent)]
    Invalid(#[from] pqgraph_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("search worker failed: {0}")]
    Worker(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.to_path_buf(),
            msg: msg.into(),
        }
    }

    /// Process exit code for this error (2 is left to argument parsing).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            Error::Format { .. } => 4,
            Error::Invalid(_) => 5,
            Error::Config(_) => 6,
            Error::Worker(_) => 7,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
            Error::Invalid(_) => "invalid-input",
            Error::Config(_) => "config",
            Error::Worker(_) => "internal",
        }
    }
}
