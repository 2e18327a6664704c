use thiserror::Error;

/// Errors raised by the pipeline.
///
/// Variants split into two families: input problems (the sequences or the
/// requested sizes are not acceptable) and numerical failures (an identity
/// that must hold did not hold to the working tolerance). See
/// [`Error::is_input_error`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ChainViolation({index}): parameter {value} left (0, 1), d_1..d_{index} is not a positive chain sequence prefix")]
    ChainViolation { index: usize, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "degree {degree} exceeds the coefficient-mode limit {limit}; use pointwise evaluation"
    )]
    DegreeTooLarge { degree: usize, limit: usize },

    #[error("backward recursion did not converge before depth {depth} (last change {achieved:e})")]
    NoConvergence { depth: usize, achieved: f64 },

    #[error("identity violated: {what} (residual {residual:e})")]
    IdentityViolation { what: String, residual: f64 },

    #[error("no sign change at level {level}, bracket {bracket}")]
    BracketFailure { level: usize, bracket: usize },

    #[error("positivity violated: {what} at index {index} (value {value:e})")]
    PositivityViolation {
        what: String,
        index: usize,
        value: f64,
    },

    #[error("weights sum to {sum} instead of 1")]
    NormalizationViolation { sum: f64 },

    #[error("series division lost precision (residual {residual:e})")]
    PrecisionLoss { residual: f64 },

    #[error("moment relation violated: {what} (residual {residual:e})")]
    RelationViolation { what: String, residual: f64 },

    #[error("convergents at z = 1 are not increasing at index {index}")]
    MonotonicityViolation { index: usize },

    #[error(
        "recursion for the R_n integrals violated at n = {index} (relative residual {residual:e})"
    )]
    RecursionViolation { index: usize, residual: f64 },

    #[error("Verblunsky routes disagree at index {index} (difference {residual:e})")]
    Mismatch { index: usize, residual: f64 },

    #[error("Gram matrix entry ({row}, {col}) is not orthogonal (relative size {residual:e})")]
    OrthogonalityViolation {
        row: usize,
        col: usize,
        residual: f64,
    },

    #[error("pole: {0}")]
    Pole(String),
}

impl Error {
    /// `true` when the error means the caller supplied something unusable,
    /// `false` for numerical failures of an identity check.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ChainViolation { .. }
                | Error::InvalidInput(_)
                | Error::Domain(_)
                | Error::DegreeTooLarge { .. }
                | Error::Pole(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
