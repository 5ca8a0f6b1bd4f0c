use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] neurolander::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 for usage and configuration errors, 2 for unreadable, unwritable or
    /// malformed files, 3 when an internal invariant is violated.
    pub fn exit_code(&self) -> ExitCode {
        use neurolander::Error as E;
        let code = match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                E::Config(_) | E::InvalidInput(_) => 1,
                E::Io { .. } | E::Parse { .. } => 2,
                E::InvalidObservation(_) | E::InvalidState(_) | E::Unevaluated(_) => 3,
            },
        };
        ExitCode::from(code)
    }
}
