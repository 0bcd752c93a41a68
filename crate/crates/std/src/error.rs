use std::path::PathBuf;

/// Exit codes of the `dilute` binary.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VERIFICATION_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERIC: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{line}: {msg}", path = path.display())]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}", path = path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] dilute_core::Error),
    #[error("could not write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        use dilute_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Config(_) | CliError::Io { .. } => exit::CONFIG,
            CliError::Core(E::InvalidInput(_) | E::OutOfValidity(_)) => exit::CONFIG,
            CliError::Core(E::Numeric { .. } | E::Resolution(_) | E::Invariant(_)) => exit::NUMERIC,
            CliError::Output(_) => exit::NUMERIC,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
