use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed word `{word}`: {reason}")]
    MalformedWord { word: String, reason: String },

    #[error("rewriting `{word}` did not terminate within {budget} steps")]
    NonTermination { word: String, budget: usize },

    #[error("invalid presentation `{name}`: {reason}")]
    InvalidPresentation { name: String, reason: String },

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("boundary of boundary is nonzero: {0}")]
    SpecConsistency(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("chain map validation failed: {0}")]
    MapValidation(String),

    #[error("{path}: field `{field}`: {reason}")]
    Document { path: String, field: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    ResourceLimit,
    Inconsistency,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::ResourceLimit(_) | Error::NonTermination { .. } | Error::WindowTooSmall(_) => {
                ErrorKind::ResourceLimit
            }
            Error::SpecConsistency(_) | Error::Internal(_) => ErrorKind::Inconsistency,
            _ => ErrorKind::Validation,
        }
    }
}
