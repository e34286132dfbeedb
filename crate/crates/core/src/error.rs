//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("labeling is not {beta}-balanced for n={n}, K={k}")]
    BalanceViolation { n: usize, k: usize, beta: f64 },

    #[error("edge probability {value} outside [0, 1]")]
    InvalidProbability { value: f64 },

    #[error("balance window [{lo}, {hi}] admits no class-size composition")]
    EmptyBalanceWindow { lo: f64, hi: f64 },

    #[error("enumeration of K^n = {candidates:e} candidates exceeds cap {cap:e}")]
    EnumerationTooLarge { candidates: f64, cap: f64 },

    #[error("graphs have different vertex counts ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("Chernoff tilt undefined: requires 0 < b and a < n (a={a}, b={b}, n={n})")]
    TiltUndefined { a: f64, b: f64, n: usize },

    #[error("balanced labeling set is empty")]
    EmptySigma,

    #[error("audit instance n={n} exceeds cap {cap}")]
    AuditTooLarge { n: usize, cap: usize },

    #[error("two-point construction needs at least two vertices per class (n/(beta*K) = {min_class_size})")]
    TooFewPerClass { min_class_size: f64 },

    #[error("split+merge count {count} exceeds exact-enumeration cap {cap}")]
    TooManyPairs { count: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
