//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input file violates the expected layout (row widths, header, ...).
    #[error("malformed input {path}: {reason} (line {line})")]
    MalformedInput {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    /// Structural mismatch between in-memory objects (shapes, lengths).
    #[error("structural error: {0}")]
    Structural(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Training could not proceed (degenerate labels, rule explosion).
    #[error("training error ({classifier}): {reason}")]
    Training { classifier: String, reason: String },

    /// A cache file exists but was written by an incompatible version.
    #[error("cache version mismatch for {path}: found {found:?}, expected {expected}; regenerate upstream")]
    CacheVersion {
        path: PathBuf,
        found: String,
        expected: String,
    },

    #[error("config error: field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
