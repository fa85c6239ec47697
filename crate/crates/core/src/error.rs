use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("norm exponent p must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("step element must be nonzero")]
    ZeroStep,
    #[error("grid spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("window [{lo}, {hi}] is empty")]
    EmptyWindow { lo: i64, hi: i64 },
    #[error("weight values must be finite and strictly positive: {0}")]
    InvalidWeight(String),
    #[error("beta must satisfy beta >= 1, got {0}")]
    InvalidBeta(f64),
    #[error("invalid convex polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("functional {0} is identically zero")]
    ZeroFunctional(usize),
    #[error("eigenvalue probe requires lambda != 0")]
    ZeroLambda,
    #[error("orbit support of {size} points exceeds the cap of {cap}; supply a truncation window")]
    SupportCap { size: usize, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
