use cfs_core::CfsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("parse error in {source_name}: {message}")]
    Parse {
        source_name: String,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io { .. } => 2,
            CliError::Numeric(_) => 3,
        }
    }

    /// Failure of a computation on the named points.
    pub fn numeric(ids: &[&str], err: CfsError) -> Self {
        if ids.is_empty() {
            CliError::Numeric(err.to_string())
        } else {
            CliError::Numeric(format!("({}): {err}", ids.join(", ")))
        }
    }
}

/// Errors raised while assembling a system from a file or a generator.
pub fn load_error(err: CfsError) -> CliError {
    match err {
        CfsError::InvalidConfig(m) => CliError::Usage(m),
        CfsError::Numeric(_) => CliError::Numeric(err.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
