use thiserror::Error;

/// Errors raised by the constructions in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0} (allowed range {1}..={2})")]
    UnsupportedDimension(usize, usize, usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not quasi-bistochastic (max row/column sum deviation {deviation:e})")]
    NotQuasiBistochastic { deviation: f64 },

    #[error("matrix is not orthogonal (max |M M^T - I| = {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("determinant {found} does not match required sign {required:+}")]
    WrongDeterminant { found: f64, required: i8 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("structural failure: {0}")]
    Structural(String),
}

pub type Result<T> = std::result::Result<T, Error>;
