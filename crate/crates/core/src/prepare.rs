//! Input states: arbitrary polarization in one bin, H-polarized two-bin
//! superpositions, or an explicit amplitude list.
//!
//! Prepared states have unit norm and a real, non-negative `(H, t0)`
//! amplitude.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // std builds resolve these as inherent methods
use num_traits::Float;

use crate::error::{Error, Result};
use crate::operators::CoinMatrix;
use crate::state::{BinGrid, Polarization, Tolerances, WalkerState};

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    /// `(α|H⟩ + β|V⟩) ⊗ |t0⟩`.
    SingleBin { alpha: Complex64, beta: Complex64 },
    /// `|H⟩ ⊗ (|t0⟩ + e^{iν}|t_k⟩) / √2`.
    TwoBin { k: usize, nu: f64 },
    Explicit {
        entries: Vec<(Polarization, usize, Complex64)>,
    },
}

impl InputSpec {
    /// `|H⟩ ⊗ |t0⟩`.
    pub fn horizontal() -> Self {
        Self::SingleBin {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    /// `(|H⟩ ± i|V⟩)/√2 ⊗ |t0⟩`; `positive` picks the sign.
    pub fn circular(positive: bool) -> Self {
        let r = core::f64::consts::FRAC_1_SQRT_2;
        Self::SingleBin {
            alpha: Complex64::new(r, 0.0),
            beta: Complex64::new(0.0, if positive { r } else { -r }),
        }
    }

    /// Highest bin the prepared state occupies.
    pub fn max_bin(&self) -> usize {
        match self {
            InputSpec::SingleBin { .. } => 0,
            InputSpec::TwoBin { k, .. } => *k,
            InputSpec::Explicit { entries } => entries.iter().map(|e| e.1).max().unwrap_or(0),
        }
    }
}

/// Builds the walker state described by `input` on `grid`.
pub fn prepare(input: &InputSpec, grid: BinGrid) -> Result<WalkerState> {
    let tol = Tolerances::DEFAULT.norm;
    let state = match input {
        InputSpec::SingleBin { alpha, beta } => {
            let norm = alpha.norm_sqr() + beta.norm_sqr();
            if !norm.is_finite() || (norm - 1.0).abs() > tol {
                return Err(Error::UnnormalizedPolarization(norm));
            }
            WalkerState::from_entries(
                grid,
                [(Polarization::H, 0, *alpha), (Polarization::V, 0, *beta)],
            )?
        }
        InputSpec::TwoBin { k, nu } => {
            if *k == 0 || *k >= grid.bin_count() {
                return Err(Error::InvalidBinOffset {
                    k: *k,
                    bin_count: grid.bin_count(),
                });
            }
            if !nu.is_finite() {
                return Err(Error::NonFinite {
                    what: "two-bin phase",
                });
            }
            let r = core::f64::consts::FRAC_1_SQRT_2;
            WalkerState::from_entries(
                grid,
                [
                    (Polarization::H, 0, Complex64::new(r, 0.0)),
                    (Polarization::H, *k, Complex64::from_polar(r, *nu)),
                ],
            )?
        }
        InputSpec::Explicit { entries } => {
            let state = WalkerState::from_entries(grid, entries.iter().copied())?;
            let total = state.norm_squared();
            if (total - 1.0).abs() > tol {
                return Err(Error::Unnormalized { total });
            }
            state
        }
    };
    fix_global_phase(state)
}

/// Rotates the global phase so the `(H, t0)` amplitude is real and
/// non-negative, or, when that amplitude vanishes, the first nonzero one.
fn fix_global_phase(state: WalkerState) -> Result<WalkerState> {
    let reference = state.amplitudes().iter().copied().find(|a| a.norm() > 0.0);
    match reference {
        Some(a) if a.im != 0.0 || a.re < 0.0 => {
            let phase = Complex64::from_polar(1.0, -a.arg());
            let mut amps: Vec<Complex64> = state.amplitudes().iter().map(|x| x * phase).collect();
            // Pin the reference exactly onto the real axis.
            if let Some(first) = amps.iter_mut().find(|x| x.norm() > 0.0) {
                *first = Complex64::new(first.norm(), 0.0);
            }
            WalkerState::from_vector(state.grid(), amps)
        }
        _ => Ok(state),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveplateKind {
    Half,
    Quarter,
}

impl WaveplateKind {
    pub fn retardance(self) -> f64 {
        match self {
            WaveplateKind::Half => core::f64::consts::PI,
            WaveplateKind::Quarter => core::f64::consts::FRAC_PI_2,
        }
    }
}

/// Jones matrix on (H, V).
pub type JonesMatrix = CoinMatrix;

/// Ideal waveplate with its fast axis at `axis_angle` radians from H.
///
/// Built as `R(θ) · diag(1, e^{−iδ}) · R(−θ)`; the slow axis lags by `δ`.
pub fn waveplate(kind: WaveplateKind, axis_angle: f64) -> JonesMatrix {
    let (s, c) = axis_angle.sin_cos();
    let lag = Complex64::from_polar(1.0, -kind.retardance());
    let one = Complex64::new(1.0, 0.0);
    // R(θ) diag(1, lag) R(−θ), with R(θ) = [[c, −s], [s, c]].
    let cc = Complex64::new(c * c, 0.0);
    let ss = Complex64::new(s * s, 0.0);
    let sc = Complex64::new(s * c, 0.0);
    CoinMatrix([
        [cc * one + ss * lag, sc * (one - lag)],
        [sc * (one - lag), ss * one + cc * lag],
    ])
}

/// Applies a Jones matrix to the polarization of every bin.
pub fn apply_jones(state: &WalkerState, jones: &JonesMatrix) -> Result<WalkerState> {
    let mut amps = state.amplitudes().to_vec();
    for pair in amps.chunks_exact_mut(2) {
        let (h, v) = jones.apply(pair[0], pair[1]);
        pair[0] = h;
        pair[1] = v;
    }
    WalkerState::from_vector(state.grid(), amps)
}
