use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix or vector contains non-finite entries")]
    NonFinite,

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    Asymmetric { asymmetry: f64 },

    #[error("matrix is not numerically positive definite (lambda_min {lambda_min:e}, lambda_max {lambda_max:e})")]
    NotPositiveDefinite { lambda_min: f64, lambda_max: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("data set is empty")]
    EmptyData,

    #[error("data point {index} is the zero vector")]
    ZeroPoint { index: usize },

    #[error("quadratic form of point {index} is not positive ({value:e})")]
    NonPositiveQuadraticForm { index: usize, value: f64 },

    #[error("basis columns are not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("eigenvalues {d} and {next} coincide (gap {gap:e}); the top-{d} subspace is ambiguous", next = .d + 1)]
    AmbiguousSubspace { d: usize, gap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
