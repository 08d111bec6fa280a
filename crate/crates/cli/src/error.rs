use std::path::PathBuf;

use thiserror::Error;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const FALLBACK: i32 = 3;
    pub const IO: i32 = 4;
    pub const NEAR_OPTIMAL: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Validation(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {msg}", path.display())]
    Parse { path: PathBuf, msg: String },

    #[error("evaluator: {0}")]
    Evaluator(String),

    #[error(transparent)]
    Core(#[from] qldpc_sched::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use qldpc_sched::Error as E;
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Evaluator(_) => exit::IO,
            CliError::Core(e) => match e {
                E::Io(_) | E::Json(_) | E::Parse { .. } | E::Backend(_) => exit::IO,
                E::InvalidParameter(_) => exit::USAGE,
                _ => exit::VALIDATION,
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl ToString) -> Self {
        CliError::Parse { path: path.into(), msg: msg.to_string() }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
