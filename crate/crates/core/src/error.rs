use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),

    #[error("instance too large to materialize: {vertices} vertices exceeds bound {bound}")]
    TooLarge { vertices: u128, bound: u64 },

    #[error("malformed model: {0}")]
    MalformedModel(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("cover check failed: {0}")]
    Cover(String),

    #[error("proof rejected: {0}")]
    ProofRejected(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
