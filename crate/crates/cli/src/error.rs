use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("config error at {source_name}:{line}: {message}")]
    ConfigLine {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("numerical error: {0}")]
    Numerical(rabisqueeze::Error),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// Process exit code: 2 config, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ConfigLine { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<rabisqueeze::Error> for CliError {
    fn from(e: rabisqueeze::Error) -> Self {
        use rabisqueeze::Error as E;
        match e {
            E::InvalidParameter(_) | E::Harmonicity { .. } | E::InvalidConfig(_) | E::FockTooSmall(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numerical(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
