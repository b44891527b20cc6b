use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exponent p = {0} outside the supported range [1 + 1e-6, 1e6]")]
    InvalidExponent(f64),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors belong to different spaces")]
    SpaceMismatch,
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("complex entry in a real-field space")]
    ComplexInRealSpace,
    #[error("operator must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("not invertible: pivot magnitude {pivot:e}")]
    NotInvertible { pivot: f64 },
    #[error("not Parseval: max-entry residual |S - I| = {residual:e}")]
    NotParseval { residual: f64 },
    #[error("U+V != I (max-entry residual {residual:e})")]
    NotComplementary { residual: f64 },
    #[error("undefined ratio at x = 0")]
    UndefinedRatio,
    #[error("generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("p must be 2, got {0}")]
    NotHilbert(f64),
    #[error("index {index} out of range for frame size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("empty frame")]
    EmptyFrame,
    #[error("frame file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
