use thiserror::Error;

use crate::state::Polarization;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bin {bin} is outside a grid of {bin_count} bins")]
    BinOutOfRange { bin: usize, bin_count: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("squared norm {norm_squared} exceeds 1 + {tolerance}")]
    NormExceeded { norm_squared: f64, tolerance: f64 },

    #[error("V amplitude in the last bin ({bin}) cannot be shifted; the grid is too small")]
    ShiftOverflow { bin: usize },

    #[error("grid of {bin_count} bins is too small for {steps} steps from bin {max_input_bin}")]
    UndersizedGrid {
        bin_count: usize,
        steps: usize,
        max_input_bin: usize,
    },

    #[error("transmission {0} is outside (0, 1]")]
    InvalidTransmission(f64),

    #[error("lossless step changed the squared norm by {drift:e}")]
    NormDrift { drift: f64 },

    #[error("polarization pair is not normalized (|alpha|^2 + |beta|^2 = {0})")]
    UnnormalizedPolarization(f64),

    #[error("two-bin offset k = {k} must be at least 1 and below {bin_count}")]
    InvalidBinOffset { k: usize, bin_count: usize },

    #[error("distribution sums to {total}, expected 1")]
    Unnormalized { total: f64 },

    #[error("negative probability {0}")]
    NegativeProbability(f64),

    #[error("{0:?} component carries no probability")]
    EmptyComponent(Polarization),

    #[error("grids differ (spacing {left} ps vs {right} ps)")]
    GridMismatch { left: f64, right: f64 },

    #[error("invalid gate configuration: {0}")]
    InvalidGate(&'static str),

    #[error("invalid pump pulse: {0}")]
    InvalidPump(&'static str),

    #[error("could not bracket the pump intensity for a pi phase shift")]
    NoBracket,

    #[error("scan grid is empty")]
    EmptyScan,

    #[error("scan delays must be strictly increasing")]
    UnsortedScan,

    #[error("trace does not cover delay {delay_ps} ps")]
    TraceNotCovering { delay_ps: f64 },

    #[error("need at least {needed} points with positive variance, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("loss component `{name}` has positive loss {loss_db} dB")]
    PositiveLoss {
        name: alloc::string::String,
        loss_db: f64,
    },

    #[error("loss component `{0}` has zero count")]
    ZeroCount(alloc::string::String),

    #[error("invalid drift model: {0}")]
    InvalidDrift(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
