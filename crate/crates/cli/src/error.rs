use std::io;
use std::path::{Path, PathBuf};

use warpgeom_core::Error as CoreError;

/// Exit status for a verification or solve failure.
pub const EXIT_FAILURE: u8 = 1;
/// Exit status for usage, configuration and input-file errors.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{}: {message}", path.display())]
    File { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Failure(String),
    #[error("{0}")]
    Core(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => EXIT_FAILURE,
            CliError::Core(
                CoreError::NonConvergence { .. }
                | CoreError::LeftSpacelikeCone { .. }
                | CoreError::Singular { .. }
                | CoreError::InternalConsistency { .. }
                | CoreError::NonFinite { .. },
            ) => EXIT_FAILURE,
            _ => EXIT_USAGE,
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn file(path: &Path, message: impl Into<String>) -> Self {
        CliError::File { path: path.to_path_buf(), message: message.into() }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
