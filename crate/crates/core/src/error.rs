use thiserror::Error;

/// Errors raised by the solver engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The problem or one of its parameters violates a structural invariant.
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// A requested operation is outside the engine's solvable families.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A transformation or root branch stopped being defined at `x`.
    #[error("domain breakdown at x = {x}: {reason}")]
    DomainBreakdown { x: f64, reason: String },

    /// The solution has a pole at (or within the guard band of) `x`.
    #[error("pole at x = {x}")]
    Pole { x: f64 },

    /// The adaptive integrator could not satisfy the tolerance without the
    /// step size falling below the representable minimum.
    #[error("step size underflow at x = {x} (h = {h:e})")]
    StepUnderflow { x: f64, h: f64 },

    /// A user supplied function returned NaN or an infinity.
    #[error("non-finite value at x = {x}")]
    NonFinite { x: f64 },

    /// A query landed outside the span on which a solution is defined.
    #[error("x = {x} outside span [{lo}, {hi}]")]
    OutOfSpan { x: f64, lo: f64, hi: f64 },

    /// The bracket handed to an inversion does not contain the target.
    #[error("target {target} not bracketed by [{lo}, {hi}]")]
    NotBracketed { target: f64, lo: f64, hi: f64 },

    /// Grid or sample abscissae were not strictly increasing.
    #[error("abscissae not strictly increasing at index {index}")]
    NonMonotone { index: usize },

    /// `dual_exponent` at n = -1.
    #[error("dual exponent undefined at n = -1")]
    UndefinedDual,
}

impl Error {
    /// True for failures that come from the mathematics of a valid problem
    /// (breakdowns, poles, integrator failure) rather than malformed input.
    pub fn is_breakdown(&self) -> bool {
        matches!(
            self,
            Error::DomainBreakdown { .. }
                | Error::Pole { .. }
                | Error::StepUnderflow { .. }
                | Error::NonFinite { .. }
                | Error::OutOfSpan { .. }
                | Error::NotBracketed { .. }
        )
    }

    pub(crate) fn breakdown(x: f64, reason: impl Into<String>) -> Self {
        Error::DomainBreakdown {
            x,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
