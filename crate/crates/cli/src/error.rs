use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] guesswork::Error),

    #[error("{0}")]
    Invalid(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(e) if e.is_resource_guard() => ExitCode::from(3),
            CliError::Core(_) | CliError::Invalid(_) => ExitCode::from(2),
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => ExitCode::from(1),
        }
    }
}
