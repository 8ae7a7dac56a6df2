use alloc::string::String;

use crate::qhall::LatticeError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("time {t} outside the background domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("wavenumber must be positive, got {0}")]
    NonPositiveWavenumber(f64),

    #[error("no instability: mu5_eff^2 = {mu5_sq} does not exceed K = {k}")]
    NoInstability { mu5_sq: f64, k: f64 },

    #[error("step size underflow at t = {t} (mode k = {k})")]
    StepUnderflow { k: f64, t: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t} (mode k = {k})")]
    StepBudget { k: f64, t: f64, max_steps: usize },

    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("mode with k = {k} is not covered by the bin edges [{lo}, {hi}]")]
    Binning { k: f64, lo: f64, hi: f64 },

    #[error(transparent)]
    Lattice(#[from] LatticeError),

    #[error("charge vector {0} is not a visible vector (gcd of coordinates is not 1)")]
    NotVisible(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration too large: {reason}")]
    ResourceGuard { reason: String },

    #[error("grid setup: {0}")]
    GridSetup(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid { field, reason: reason.into() }
    }
}
