use thiserror::Error;

use crate::ore::Point;

/// Errors produced by the exact-arithmetic, enumeration and operator layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gcd undefined: both arguments are zero")]
    GcdUndefined,

    #[error("division by zero")]
    DivisionByZero,

    #[error("bad evaluation point: {0}")]
    BadEvaluationPoint(String),

    #[error("singular system: rank {rank} of {size}")]
    SingularSystem { rank: usize, size: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("enumeration too large: n = {n} exceeds limit {limit} (predicted {predicted} diagrams)")]
    EnumerationTooLarge { n: u32, limit: u32, predicted: String },

    #[error("diagram is not totally symmetric")]
    NotSymmetric,

    #[error("operator is not diagonal-shaped")]
    NotDiagonal,

    #[error("operator is not univariate in Sn: {0}")]
    NotUnivariate(String),

    #[error("point {0} missing from table domain")]
    MissingPoint(Point),

    #[error("coefficient denominator vanishes at {0}")]
    SingularCoefficient(Point),

    #[error("only {found} admissible points, at least {required} required")]
    NoAdmissiblePoints { found: usize, required: usize },

    #[error("insufficient data: {needed} equations required, {available} available ({detail})")]
    InsufficientData {
        needed: usize,
        available: usize,
        detail: String,
    },

    #[error("mixed table modes")]
    ModeMismatch,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
