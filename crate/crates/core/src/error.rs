use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("quadrature failed: {reason} (evaluations: {evaluations}, last error estimate: {last_error:e})")]
    Quadrature {
        reason: String,
        evaluations: usize,
        last_error: f64,
    },

    #[error("oscillatory tail did not converge after {lobes} lobes (last error estimate: {last_error:e})")]
    TailDivergence { lobes: usize, last_error: f64 },

    #[error("step size underflow at tau = {tau} (h = {step:e})")]
    StepUnderflow { tau: f64, step: f64 },

    #[error("same-atom Hamiltonian coefficients need a frequency cutoff")]
    MissingCutoff,

    #[error(
        "insufficient oscillations: {sign_changes} sign changes and {maxima} local maxima in sweep"
    )]
    InsufficientOscillations { sign_changes: usize, maxima: usize },

    #[error("power-law fit needs at least 4 points inside the window, got {0}")]
    InsufficientPoints(usize),

    #[error("cannot take the logarithm of non-positive value {value} at L = {length}")]
    NonPositive { length: f64, value: f64 },

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::TailDivergence { .. } | Error::StepUnderflow { .. }
        )
    }
}
