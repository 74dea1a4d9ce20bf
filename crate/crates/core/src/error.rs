use thiserror::Error;

/// Errors raised by the library.
///
/// `Internal` is reserved for post-condition failures that the underlying
/// mathematics rules out; seeing one means a bug, not bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("genus value mismatch on class {witness}: {detail}")]
    GenusMismatch { witness: String, detail: String },

    #[error("refused: {0}")]
    Refused(String),

    #[error("unrecognized construction move `{0}`")]
    UnknownMove(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
