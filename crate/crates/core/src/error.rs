//! Crate-wide error type and the process exit codes the CLI maps it onto.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside the documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation was attempted in a state that cannot support it
    /// (e.g. binarizing an accumulator that has seen no vectors).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Lookup of a symbol that was never admitted to the item memory.
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),

    #[error("encode error: {0}")]
    Encode(String),

    #[error("training error: {0}")]
    Training(String),

    /// Input data could not be read or parsed; the path names the offender.
    #[error("ingest error ({path}): {msg}")]
    Ingest { path: PathBuf, msg: String },

    /// A model file and the requested run configuration disagree.
    #[error("model/config mismatch: {0}")]
    Mismatch(String),

    /// A model file is structurally unreadable (bad magic, truncation, ...).
    #[error("model file format: {0}")]
    Format(String),

    /// An internal consistency check failed; nothing the caller did is wrong.
    #[error("invariant breach: {0}")]
    InvariantBreach(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code contract: 2 for anything wrong with inputs or I/O,
    /// 3 for model/config disagreements, 4 for internal invariant breaches.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Mismatch(_) | Error::Format(_) => 3,
            Error::InvariantBreach(_) => 4,
            _ => 2,
        }
    }

    pub(crate) fn ingest(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Ingest { path: path.into(), msg: msg.into() }
    }
}
