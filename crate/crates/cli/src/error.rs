use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("cost guard: {0}")]
    CostGuard(String),
    #[error("tolerance exceeded: {0}")]
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::CostGuard(_) => 3,
            CliError::Tolerance(_) => 4,
        }
    }

    pub fn to_exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }

    pub(crate) fn at(path: &str, err: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{path}: {err}"))
    }
}

impl From<ringqpe::Error> for CliError {
    fn from(err: ringqpe::Error) -> Self {
        match err {
            ringqpe::Error::CostGuard(msg) => CliError::CostGuard(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
