use thiserror::Error;

use ptpm_core::{PtaError, SkipError, WordError};

/// Failures mapped to process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input: exit 2.
    #[error("{0}")]
    Input(String),
    /// No accepting location is reachable: exit 3.
    #[error("pattern is unsatisfiable: {0}")]
    Unsatisfiable(String),
    /// Broken invariant or I/O failure on output: exit 1.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Input(_) => 2,
            CliError::Unsatisfiable(_) => 3,
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input(message.into())
    }
}

impl From<PtaError> for CliError {
    fn from(e: PtaError) -> Self {
        CliError::Input(format!("pattern: {e}"))
    }
}

impl From<WordError> for CliError {
    fn from(e: WordError) -> Self {
        CliError::Input(format!("word: {e}"))
    }
}

impl From<SkipError> for CliError {
    fn from(e: SkipError) -> Self {
        match e {
            SkipError::Unsatisfiable => CliError::Unsatisfiable("no accepting location is reachable".into()),
            other => CliError::Input(format!("skip tables: {other}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
