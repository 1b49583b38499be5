//! CLI-side error type wrapping solver errors, I/O and format problems.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Solver(#[from] nsf_core::Error),
}

impl CliError {
    /// Exit status of the process for this error, following the run-command
    /// contract: 1 configuration/validation, 2 convergence failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(nsf_core::Error::ConvergenceFailure { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
