use thiserror::Error;

/// Errors raised by the computational engines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("lattice must be negative definite, got {0:?}")]
    NotNegativeDefinite(crate::lattice::Definiteness),

    #[error("search budget of {budget} nodes exhausted after {explored} nodes")]
    BudgetExceeded { budget: u64, explored: u64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported knot: {0}")]
    Unsupported(String),

    #[error("parse error at column {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
