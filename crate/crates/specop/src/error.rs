use std::path::PathBuf;

use specop_core::Error as CoreError;

/// Failures surfaced by the command-line driver, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    /// Input is valid but outside what the test supports.
    #[error("{0}")]
    Scope(String),
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Core(CoreError),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io { .. } => 2,
            CliError::Scope(_) => 3,
            CliError::Degenerate(_) => 4,
            CliError::Core(e) => match e {
                CoreError::Incompatible(_) => 3,
                CoreError::Degenerate(_) | CoreError::NoValidBandwidth | CoreError::InvalidEstimate(_) => 4,
                _ => 2,
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}
