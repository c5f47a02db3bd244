use thiserror::Error;

/// Errors raised by the numerical kernels and model builders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |H - H^dagger| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size limit exceeded: {0}")]
    TooLarge(String),

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("wrong momentum mode kind: {0}")]
    ModeKind(&'static str),

    #[error("Fock truncation: {0}")]
    Truncation(String),

    #[error("invalid time series: {0}")]
    TimeSeries(String),
}

pub type Result<T> = std::result::Result<T, Error>;
