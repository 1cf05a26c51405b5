use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vectors share no beacon")]
    NoOverlap,

    #[error("conflict: {0}")]
    Conflict(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported format version {found} (this build reads version {expected})")]
    Version { found: u64, expected: u64 },

    #[error("observation shares no beacon with any subarea")]
    Unlocatable,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("stale state: {0}")]
    Stale(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn from_json(err: &serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
