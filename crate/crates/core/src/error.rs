use thiserror::Error;

/// Errors raised by the extractor toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcextError {
    #[error("field mismatch")]
    FieldMismatch,
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("dimension must be a prime power, got {0}")]
    NotPrimePower(usize),
    #[error("unsupported field size {0}: q must be at most 64")]
    FieldTooLarge(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bad subsystem index {index} for {count} subsystems")]
    BadSubsystem { index: usize, count: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("sigma support insufficient")]
    SupportViolation,
    #[error("SDP did not converge after {iterations} iterations (primal {primal}, dual {dual})")]
    SolverNonConvergence {
        iterations: usize,
        primal: f64,
        dual: f64,
    },
    #[error("dimension budget exceeded: {0}")]
    Budget(String),
    #[error("bound vacuous/undefined: {0}")]
    VacuousBound(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no security in this regime: {0}")]
    NoSecurity(String),
    #[error("no strong converse below capacity (R = {0})")]
    BelowCapacity(f64),
    #[error("malformed input: {0}")]
    Format(String),
}

impl QcextError {
    /// Stable machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            QcextError::FieldMismatch => "field_mismatch",
            QcextError::ZeroInverse => "zero_inverse",
            QcextError::NotPrimePower(_) => "not_prime_power",
            QcextError::FieldTooLarge(_) => "field_too_large",
            QcextError::DimensionMismatch(_) => "dimension_mismatch",
            QcextError::BadSubsystem { .. } => "bad_subsystem",
            QcextError::NotSquare { .. } => "not_square",
            QcextError::InvalidState(_) => "invalid_state",
            QcextError::SupportViolation => "support_violation",
            QcextError::SolverNonConvergence { .. } => "solver_non_convergence",
            QcextError::Budget(_) => "budget",
            QcextError::VacuousBound(_) => "vacuous_bound",
            QcextError::InvalidParameter(_) => "invalid_parameter",
            QcextError::NoSecurity(_) => "no_security",
            QcextError::BelowCapacity(_) => "below_capacity",
            QcextError::Format(_) => "format",
        }
    }

    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_internal(&self) -> bool {
        matches!(self, QcextError::SolverNonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, QcextError>;
