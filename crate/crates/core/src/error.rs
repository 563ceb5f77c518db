use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Stream(#[from] std::io::Error),

    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },

    #[error("{origin}: file is empty")]
    Empty { origin: String },

    #[error("zero-norm vector for term {term:?}")]
    ZeroVector { term: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("term {0:?} is not in the vocabulary")]
    NotFound(String),

    #[error("duplicate id {id:?} in {origin}")]
    DuplicateId { origin: String, id: String },

    #[error("id sets differ: {0}")]
    IdMismatch(String),

    #[error("no lexicon registered for language {0:?}")]
    MissingLexicon(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(origin: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            origin: origin.to_string(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
