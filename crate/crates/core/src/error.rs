use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("map is not well defined: {0}")]
    NotWellDefined(String),

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
