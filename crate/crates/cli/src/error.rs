use asymm_core::AsymmError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or out-of-range input.
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Compute(#[from] AsymmError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Compute(_) => 3,
        }
    }

    pub(crate) fn input(e: AsymmError) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
