use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = AolError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AolError {
    /// A caller broke an operation's precondition (length mismatch,
    /// non-finite coordinate, weights for the wrong architecture, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unknown architecture `{0}`")]
    UnknownArch(String),

    #[error("training batch is empty")]
    EmptyBatch,

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Malformed weight snapshot; `offset` is the byte where decoding stopped.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl AolError {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        AolError::Contract(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        AolError::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AolError::Io {
            path: path.into(),
            source,
        }
    }
}
