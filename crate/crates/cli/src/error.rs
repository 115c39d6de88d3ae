use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration at `{key}`: {message}")]
    Validation { key: String, message: String },
    #[error("solver failure at `{key}`: {message}")]
    Solver { key: String, message: String },
    #[error("acceptance check failed: {}", .0.join("; "))]
    Check(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Validation { .. } => 2,
            CliError::Solver { .. } => 3,
            CliError::Check(_) => 4,
        }
    }

    pub fn invalid(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Attaches the config location of a library error.
pub trait AtKey<T> {
    fn at(self, key: &str) -> Result<T, CliError>;
}

impl<T> AtKey<T> for nullctl::Result<T> {
    fn at(self, key: &str) -> Result<T, CliError> {
        self.map_err(|e| {
            let key = match &e {
                nullctl::Error::Config { key: inner, .. } if !key.is_empty() => format!("{key}.{inner}"),
                nullctl::Error::Config { key: inner, .. } => inner.clone(),
                _ => key.to_string(),
            };
            let message = match &e {
                nullctl::Error::Config { message, .. } => message.clone(),
                other => other.to_string(),
            };
            if e.is_solver_failure() {
                CliError::Solver { key, message }
            } else {
                CliError::Validation { key, message }
            }
        })
    }
}
