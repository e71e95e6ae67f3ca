use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("family must have at least one member")]
    EmptyFamily,
    #[error("expected {expected} coefficients, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("member {index} is the zero polynomial")]
    ZeroMember { index: usize },
    #[error("polynomial is not real-rooted (margin {margin:.3e})")]
    NotRealRooted { margin: f64 },
    #[error("member {index} is not real-rooted (margin {margin:.3e})")]
    NotRealRootedInput { index: usize, margin: f64 },
    #[error("family is not proper: a convex combination vanishes")]
    NotProper { weights: Vec<f64> },
    #[error("family members share the root {root}")]
    CommonRootPresent { root: f64 },
    #[error("family is not 3-compatible (triple {triple:?})")]
    Not3Compatible { triple: Vec<usize> },
    #[error("family is not compatible")]
    NotCompatible,
    #[error("retry budget exhausted after {attempts} attempts")]
    RetryBudgetExhausted { attempts: usize },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
