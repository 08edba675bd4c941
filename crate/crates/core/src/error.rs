use thiserror::Error;

/// Failure to parse a field expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("coordinate x{coord} at offset {offset} is not allowed in dimension {dim}")]
    CoordinateNotAllowed { coord: u8, dim: usize, offset: usize },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::CoordinateNotAllowed { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

/// Evaluation outside the domain guard of a node.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain violation in `{node}`: {reason}")]
pub struct DomainError {
    pub node: String,
    pub reason: String,
}

impl DomainError {
    pub fn new(node: impl Into<String>, reason: impl Into<String>) -> Self {
        DomainError { node: node.into(), reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid point: {0}")]
    Point(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("sampling error: {0}")]
    Sampling(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
