//! Command-level failures and their process exit codes.

use std::fmt;

/// Everything a command can fail with. Library errors keep their structure
/// so the exit code can tell artifact trouble apart from numeric trouble.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or an unusable argument combination.
    Usage(String),
    /// Anything raised by the pipeline library, including file errors.
    Core(smash_core::Error),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    /// The process contract: 0 success, 1 usage, 2 file I/O or format,
    /// 3 numeric (singular denominators, mismatched dimensions, ...).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_io() => 2,
            CliError::Core(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<smash_core::Error> for CliError {
    fn from(e: smash_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(smash_core::Error::Io(e))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
