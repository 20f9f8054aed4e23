use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("non-binary {role} column `{column}`: found {found} distinct values")]
    NonBinaryColumn {
        role: &'static str,
        column: String,
        found: usize,
    },

    #[error("value `{value}` does not occur in {role} column `{column}`")]
    UnknownValue {
        role: &'static str,
        column: String,
        value: String,
    },

    #[error("ragged row at line {line}: expected {expected} cells, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("missing cell at line {line}, column `{column}`")]
    MissingCell { line: usize, column: String },

    #[error("empty table")]
    EmptyTable,

    #[error("sensitive group z={0} is empty")]
    EmptyGroup(u8),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("could not split with both sensitive groups in each part after {0} attempts")]
    SplitFailed(usize),

    #[error("numerical divergence at iteration {iteration}: non-finite {what}")]
    Divergence { iteration: usize, what: String },

    #[error("config error at line {line} (key `{key}`): {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("malformed file {}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("empty trace")]
    EmptyTrace,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn dims(expected: usize, got: usize) -> Self {
        Error::DimensionMismatch { expected, got }
    }
}
