use std::io;
use std::path::PathBuf;

/// Errors raised by the linking toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{origin}:{line}: {msg}")]
    Parse { origin: String, line: usize, msg: String },

    #[error("duplicate entity id `{0}`")]
    DuplicateId(String),

    #[error("`{0}` is empty after normalization")]
    DegenerateInput(String),

    #[error("mention `{0}` has no context tokens on either side")]
    DegenerateContext(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unknown entity id `{0}`")]
    UnknownEntity(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "scaled confusion needs both classes in the truth labels (positives: {positives}, negatives: {negatives})"
    )]
    SingleClass { positives: usize, negatives: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(origin: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            origin: origin.into(),
            line,
            msg: msg.into(),
        }
    }
}
