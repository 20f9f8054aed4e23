use std::path::PathBuf;

use fairmax_core::Error as CoreError;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("incomplete run directory {}: {message}", path.display())]
    Run { path: PathBuf, message: String },
}

impl CliError {
    pub fn output(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Output {
            path: path.into(),
            source,
        }
    }

    /// 2 usage or config, 3 data, 4 numerical divergence, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                CoreError::Config { .. } | CoreError::InvalidArgument(_) => 2,
                CoreError::Divergence { .. } => 4,
                _ => 3,
            },
            CliError::Run { .. } => 3,
            CliError::Output { .. } => 1,
        }
    }
}
