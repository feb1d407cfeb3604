use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("{module}: {source}")]
    Numerical {
        module: &'static str,
        source: ergoquench_core::Error,
    },
    #[error("{0}")]
    Core(ergoquench_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }

    /// Wraps an engine error, tagging invariant violations with the module
    /// that raised them.
    pub fn engine(module: &'static str, err: ergoquench_core::Error) -> Self {
        match err {
            ergoquench_core::Error::InvariantViolation { .. } => {
                CliError::Numerical { module, source: err }
            }
            other => CliError::Core(other),
        }
    }
}
