use std::io;
use std::path::PathBuf;

use duhamel::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("precondition `{name}` failed: {detail}")]
    Precondition { name: &'static str, detail: String },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Compute(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Precondition { .. } => 3,
            CliError::Verification(_) => 4,
            CliError::Io { .. } | CliError::Compute(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { path, message } => CliError::Config { path, message },
            Error::Precondition { name, detail } => CliError::Precondition { name, detail },
            other => CliError::Compute(other),
        }
    }
}
