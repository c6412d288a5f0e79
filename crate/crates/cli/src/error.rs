use std::path::PathBuf;

use thiserror::Error;

/// Exit code on success.
pub const EXIT_OK: i32 = 0;
/// Exit code when `verify` finds a failing check.
pub const EXIT_VERIFY_FAILED: i32 = 1;
/// Exit code for unparseable or invalid input.
pub const EXIT_INVALID_INPUT: i32 = 2;
/// Exit code when the input matrix is not a physical state.
pub const EXIT_UNPHYSICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("unphysical state: {0}")]
    Unphysical(chsh_meter::Error),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => EXIT_INVALID_INPUT,
            CliError::Unphysical(_) => EXIT_UNPHYSICAL,
            CliError::VerificationFailed(_) => EXIT_VERIFY_FAILED,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl From<chsh_meter::Error> for CliError {
    fn from(e: chsh_meter::Error) -> Self {
        if e.is_unphysical() {
            CliError::Unphysical(e)
        } else {
            CliError::Input(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
