use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator stack is empty")]
    EmptyStack,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("every matrix in the stack is identically zero")]
    AllZero,

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not symmetric (asymmetry {asymmetry:.3e} exceeds {bound:.3e})")]
    NotSymmetric { asymmetry: f64, bound: f64 },

    #[error("eigensolver did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("eigenpair residual {residual:.3e} exceeds bound {bound:.3e}")]
    InaccurateEigenpair { residual: f64, bound: f64 },

    #[error("vector is zero")]
    ZeroVector,

    #[error("expected exactly 2 columns, found {0}")]
    WrongShape(usize),

    #[error("column norms differ: {norm1} vs {norm2}")]
    ColumnNormMismatch { norm1: f64, norm2: f64 },

    #[error("matrix is not positive definite (Cholesky pivot {pivot} is {value:.3e})")]
    NotSpd { pivot: usize, value: f64 },

    #[error("dimension {dim} too large for the sampling oracle (max {max})")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vector is constant (standard deviation {std:.3e})")]
    ConstantVector { std: f64 },

    #[error("column {index} is constant")]
    ConstantColumn { index: usize },

    #[error("vector too short: length {0}, need at least 2")]
    TooShort(usize),

    #[error("data is not standardized")]
    NotStandardized,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("probability at index {index} is invalid ({value})")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, which exceeds 1")]
    MassExceedsOne { sum: f64 },
}
