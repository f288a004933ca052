use thiserror::Error;

use crate::ratings::{ItemId, UserId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Ingest { line: usize, message: String },

    #[error("line {line}: duplicate rating for user {user}, item {item}")]
    DuplicateRating {
        line: usize,
        user: UserId,
        item: ItemId,
    },

    #[error("unknown user {0}")]
    UnknownUser(UserId),

    #[error("user {0} has no cluster assignment")]
    UnassignedUser(UserId),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
