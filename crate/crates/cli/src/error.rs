use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or invalid configuration, or bad command-line usage.
    #[error("{0}")]
    Config(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A pipeline failed at one sweep point.
    #[error("{variable} = {value}, method {method}: {source}")]
    Numerical {
        variable: &'static str,
        value: f64,
        method: dqme_core::Method,
        #[source]
        source: dqme_core::Error,
    },
}

impl CliError {
    /// Process exit code: 1 for configuration and usage problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical { .. } => 2,
        }
    }
}
