use thiserror::Error;

use crate::hypergraph::VertexId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("hypergraph is disconnected")]
    Disconnected,

    /// A hypothesis of an operation or construction does not hold. `condition`
    /// names the failed condition, `detail` carries the offending values.
    #[error("precondition failed [{condition}]: {detail}")]
    Precondition { condition: String, detail: String },

    #[error("invalid hypergraph: {0}")]
    Invalid(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    /// Raised when a fact that the construction guarantees turns out false.
    /// Seeing one means a bug, never a bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn precondition(condition: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Precondition {
            condition: condition.into(),
            detail: detail.into(),
        }
    }

    pub fn condition(&self) -> Option<&str> {
        match self {
            Error::Precondition { condition, .. } => Some(condition),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
