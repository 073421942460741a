use thiserror::Error;

/// Errors raised by the library. Every operation reports violated
/// preconditions through this type instead of panicking.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FptError {
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("prime {0} is too large for single-word coefficient arithmetic")]
    PrimeTooLarge(u64),

    #[error("polynomial is not homogeneous: {first} has degree {first_degree}, {second} has degree {second_degree}")]
    Inhomogeneous {
        first: String,
        first_degree: u64,
        second: String,
        second_degree: u64,
    },

    #[error("f ∉ m: polynomial is zero or has a constant term")]
    NotInMaximalIdeal,

    #[error("invalid grading: {0}")]
    InvalidGrading(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

impl FptError {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        FptError::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, FptError>;
