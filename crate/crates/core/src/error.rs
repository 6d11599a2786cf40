use thiserror::Error;

/// Errors raised by the risk library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("`{name}` = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("cannot parse {what}: {reason}")]
    Parse { what: &'static str, reason: String },

    #[error("sample is empty")]
    EmptySample,

    #[error("non-finite value in input at position {index}")]
    NonFinite { index: usize },

    #[error("loss is almost surely constant; {0} is not identified")]
    ConstantSource(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("root is not bracketed on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("{method} did not converge after {iterations} iterations")]
    NoConvergence { method: &'static str, iterations: usize },

    #[error("quadrature reached tolerance {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("no scenario with total loss strictly above {threshold} at level {alpha}")]
    EmptyTailEvent { alpha: f64, threshold: f64 },

    #[error("singular expansion: {0}")]
    Singular(&'static str),

    #[error("sample size overflows: {0:e}")]
    Overflow(f64),

    #[error("i/o: {0}")]
    Io(String),
}

impl RiskError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        RiskError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn range(name: &'static str, value: f64, range: &'static str) -> Self {
        RiskError::OutOfRange { name, value, range }
    }

    /// True for errors caused by the caller's input rather than by a computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            RiskError::InvalidParameter { .. }
                | RiskError::OutOfRange { .. }
                | RiskError::Parse { .. }
                | RiskError::EmptySample
                | RiskError::NonFinite { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, RiskError>;
