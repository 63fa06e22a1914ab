use thiserror::Error;

use crate::parse::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("coordinate `{0}` is not assigned at the point")]
    MissingCoordinate(String),
    #[error("coordinate `{name}` has order {order}, beyond the point's order bound {bound}")]
    BeyondOrderBound { name: String, order: usize, bound: usize },
    #[error("point has order bound {available}, but order {required} is required")]
    InsufficientPoint { required: usize, available: usize },
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("line {line}: {message}")]
    Dsl { line: usize, message: String },
    #[error("unsupported metric: {0}")]
    Metric(String),
    #[error("invalid jet context: {0}")]
    Context(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
