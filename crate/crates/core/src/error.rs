use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("n must be at least 1")]
    InvalidN,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid structure constants: {0}")]
    InvalidStructure(String),
    #[error("invalid automorphism parameters: {0}")]
    InvalidParams(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("form is not positive definite")]
    NonPositiveDefinite,
    #[error("metric is degenerate")]
    DegenerateMetric,
    #[error("2-form is degenerate")]
    DegenerateOmega,
    #[error("ad-invariant form has alpha = 0")]
    Degenerate,
    #[error("residual {residual:e} exceeds tolerance {tol:e}")]
    ToleranceFailure { residual: f64, tol: f64 },
    #[error("not an almost complex structure (J^2 != -Id)")]
    NotAlmostComplex,
    #[error("complex structure is not integrable")]
    NotIntegrable,
    #[error("complex structure does not match the integrable family: {0}")]
    NotInFamily(String),
    #[error("normalization needs an irrational square root; retry in float mode")]
    IrrationalNormalization,
    #[error("verification routes disagree: {0}")]
    RouteMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
