use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

/// Process exit codes, one per error class.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const NUMERIC: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: line {line}, column `{column}`: {message}", path.display())]
    Parse { path: PathBuf, line: u64, column: String, message: String },

    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: subsimplex_core::Error,
    },

    #[error(transparent)]
    Core(#[from] subsimplex_core::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("ternary plot needs data on the 2-simplex, got dimension {dim}")]
    DimensionNotTwo { dim: usize },

    #[error("manifest {}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => exit::IO,
            CliError::Parse { .. } | CliError::Manifest { .. } => exit::PARSE,
            CliError::Config(_) | CliError::DimensionNotTwo { .. } => exit::VALIDATION,
            CliError::Input { source: e, .. } | CliError::Core(e) => {
                if e.is_validation() {
                    exit::VALIDATION
                } else {
                    exit::NUMERIC
                }
            }
        }
    }
}
