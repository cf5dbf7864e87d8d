//! Command-line failures and their exit codes.

use ballasy_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Uncovered(String),
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Uncovered(_) => 2,
            CliError::Failed(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UncoveredRegime { .. } => CliError::Uncovered(e.to_string()),
            Error::InvalidParameter(_)
            | Error::DimensionMismatch { .. }
            | Error::NotInterior { .. }
            | Error::Arity { .. }
            | Error::Unsupported(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
