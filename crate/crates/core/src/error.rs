use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("quaternionic dimension must be at least 1")]
    ZeroDimension,

    #[error("real dimension {dim_r} exceeds the configured cap {cap}")]
    DimensionCap { dim_r: usize, cap: usize },

    #[error("real dimension {0} is not a positive multiple of 4")]
    NotQuaternionic(usize),

    #[error("structure coefficients violate a^2 + b^2 + c^2 = 1 (got {0})")]
    NormViolation(String),

    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("scalar mode mismatch: cannot combine exact and float values")]
    ModeMismatch,

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("odd degree {0} where an even degree is required")]
    OddDegree(usize),

    #[error("subspace dimension {0} is odd")]
    OddDimension(usize),

    #[error("basis is linearly dependent (rank {rank} < {expected})")]
    DegenerateBasis { rank: usize, expected: usize },

    #[error("degree overflow: requested degree {requested} exceeds {max}")]
    DegreeOverflow { requested: usize, max: usize },

    #[error("operator shift mismatch: {0} vs {1}")]
    ShiftMismatch(i32, i32),

    #[error("sublattice is not primitive: {0}")]
    NotPrimitive(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("enumeration guard exceeded: {size} classes > limit {limit}")]
    GuardExceeded { size: u128, limit: u128 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("certificate failure: {0}")]
    CertificateFailure(String),

    #[error("independent predicates disagree: {0}")]
    Disagreement(String),
}

impl Error {
    /// Failures that signal a broken mathematical property or an internal
    /// certificate, as opposed to bad input.
    pub fn is_property_failure(&self) -> bool {
        matches!(self, Error::InvariantViolation(_) | Error::CertificateFailure(_) | Error::Disagreement(_))
    }
}
