use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("weight is outside the region where the decision procedure applies: {0}")]
    OutsideRegion(String),
    #[error("invalid flag: {0}")]
    InvalidFlag(String),
    #[error("{0}")]
    Input(String),
    #[error("{pointer}: {message}")]
    Parse { pointer: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("internal consistency fault: {0}")]
    Consistency(String),
}

impl Error {
    pub fn parse(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
