use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("generator x{0} has no assigned value")]
    UnboundGenerator(u32),

    #[error("invalid generator index {0} (generators are numbered from 1)")]
    InvalidGenerator(u32),

    #[error("series orders differ: {0} vs {1}")]
    OrderMismatch(u32, u32),

    #[error("series has constant term {0}, expected 1 for a loop element")]
    NotLoopElement(String),

    #[error("division by a series with zero constant term")]
    NotInvertible,

    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("invalid deviation indices {indices:?}: {reason}")]
    InvalidIndices { indices: Vec<usize>, reason: String },

    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),

    #[error("element {0} is outside the loop")]
    ElementOutOfRange(usize),

    #[error("subloop is not normal: {0}")]
    NotNormal(String),

    #[error("selection is not a subset of the decomposition leaves: {0}")]
    InvalidSelection(String),

    #[error("malformed JSON: {0}")]
    Json(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
