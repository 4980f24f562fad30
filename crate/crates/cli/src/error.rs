use std::process::ExitCode;

use thiserror::Error;

/// Failure classes mapped onto the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("numerical failure in stage `{stage}`: {source}")]
    Numerical {
        stage: String,
        #[source]
        source: husimi::Error,
    },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn numerical(stage: impl Into<String>) -> impl FnOnce(husimi::Error) -> CliError {
        let stage = stage.into();
        move |source| CliError::Numerical { stage, source }
    }

    pub fn io(path: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
