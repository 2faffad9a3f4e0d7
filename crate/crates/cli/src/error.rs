use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed configuration.
    #[error("config error: {0}")]
    Config(String),

    /// A parameter violates a precondition of the target operation.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Raised by callers when a self-check report has failing suites.
    #[error("selfcheck failed: {0}")]
    Selfcheck(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Validation(_) => 3,
            CliError::Selfcheck(_) => 4,
        }
    }
}

impl From<flycat::Error> for CliError {
    fn from(e: flycat::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub(crate) fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}
