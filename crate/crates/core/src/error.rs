use thiserror::Error;

/// Errors produced by the numerical routines.
///
/// The variants are grouped so that callers (the CLI in particular) can map
/// them onto a small set of outcomes: invalid input, a violated mathematical
/// precondition, or a numerical failure to converge.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FracError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid fractional order alpha = {0}: must satisfy 0 < alpha < 1")]
    InvalidOrder(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{what} did not converge (partial estimate {partial:e}, error estimate {error_estimate:e})")]
    Evaluation {
        what: String,
        partial: f64,
        error_estimate: f64,
    },

    #[error("singular parameters: {0}")]
    Singular(String),

    #[error(
        "no solution exists: the necessary condition lambda*u0 + f(0) = 0 fails \
         (lambda*u0 + f(0) = {residual:e}, tolerance {tolerance:e})"
    )]
    Existence { residual: f64, tolerance: f64 },

    #[error("positivity violated at node {index}: value {value:e}")]
    Positivity { index: usize, value: f64 },

    #[error("envelope violated at (t = {t}, u = {u}): {detail}")]
    Envelope { t: f64, u: f64, detail: String },

    #[error("configuration error: {0}")]
    Config(String),
}

impl FracError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        FracError::Domain(msg.into())
    }

    /// True for failures of a mathematical precondition (as opposed to bad
    /// input or numerical non-convergence).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            FracError::Singular(_)
                | FracError::Existence { .. }
                | FracError::Positivity { .. }
                | FracError::Envelope { .. }
        )
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self, FracError::Evaluation { .. })
    }
}

pub type Result<T> = std::result::Result<T, FracError>;
