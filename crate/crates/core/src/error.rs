use thiserror::Error;

use crate::spectral::FourierState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid of {points} points cannot resolve modes up to |n| = {cutoff} (need at least {required})")]
    UnderResolved {
        points: usize,
        cutoff: usize,
        required: usize,
    },

    #[error("time step {dt} aliases the dispersion relation: n^2 = {max_frequency} exceeds the Nyquist frequency {nyquist}")]
    TemporallyUnderResolved {
        dt: f64,
        max_frequency: f64,
        nyquist: f64,
    },

    #[error("trajectory has {samples} samples, at least {required} are required")]
    TrajectoryTooShort { samples: usize, required: usize },

    #[error("mode cutoff mismatch: expected {expected}, found {found}")]
    CutoffMismatch { expected: usize, found: usize },

    #[error("time stamps do not line up: expected t = {expected}, found t = {found}")]
    TimeMismatch { expected: f64, found: f64 },

    #[error("trajectory does not start at the supplied initial state (L2 mismatch {mismatch:e})")]
    InitialStateMismatch { mismatch: f64 },

    #[error("non-finite solution detected at t = {time} ({reason})")]
    BlowUp {
        time: f64,
        reason: String,
        last_state: Box<FourierState>,
    },

    #[error("datum has H^{s} norm {norm} above the budget K = {budget}")]
    DatumOutsideBudget { s: f64, norm: f64, budget: f64 },

    #[error("integer overflow while evaluating {0}")]
    Overflow(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of the numerical flow rather than of the inputs.
    pub fn is_numerical_failure(&self) -> bool {
        matches!(self, Error::BlowUp { .. })
    }
}
