//! Coin, shift and step operators, and N-step evolution.
//!
//! One step is `U = S · C`: the coin mixes H and V inside every bin, then the
//! shift moves V amplitude one bin later while H stays put. Loss is a
//! polarization-independent amplitude factor `sqrt(transmission)` per step.

mod dense;

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
#[allow(unused_imports)] // std builds resolve these as inherent methods
use num_traits::Float;

use crate::analysis::db_to_linear;
use crate::error::{Error, Result};
use crate::state::{Polarization, Tolerances, WalkerState};

pub use dense::{dense_walk_oracle, step_matrix, DenseMatrix};

/// Coin parameters in radians: `omega` sets the splitting, `gamma` the phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinParams {
    pub omega: f64,
    pub gamma: f64,
}

impl CoinParams {
    pub const HADAMARD: CoinParams = CoinParams {
        omega: FRAC_PI_2,
        gamma: 0.0,
    };

    pub fn new(omega: f64, gamma: f64) -> Self {
        Self { omega, gamma }
    }

    pub fn from_degrees(omega_deg: f64, gamma_deg: f64) -> Self {
        Self::new(omega_deg.to_radians(), gamma_deg.to_radians())
    }
}

impl Default for CoinParams {
    fn default() -> Self {
        Self::HADAMARD
    }
}

/// 2×2 operator on the (H, V) coin space, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMatrix(pub [[Complex64; 2]; 2]);

impl CoinMatrix {
    #[inline]
    pub fn apply(&self, h: Complex64, v: Complex64) -> (Complex64, Complex64) {
        let m = &self.0;
        (m[0][0] * h + m[0][1] * v, m[1][0] * h + m[1][1] * v)
    }

    pub fn adjoint(&self) -> CoinMatrix {
        let m = &self.0;
        CoinMatrix([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn mul(&self, rhs: &CoinMatrix) -> CoinMatrix {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        CoinMatrix(out)
    }

    /// `max |(M†M − I)_ij|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let mut worst = 0.0_f64;
        for (i, row) in p.0.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((cell - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Coin operator
/// `cos(Ω/2)|H⟩⟨H| + e^{iγ} sin(Ω/2)|H⟩⟨V| + e^{−iγ} sin(Ω/2)|V⟩⟨H| − cos(Ω/2)|V⟩⟨V|`.
pub fn coin_matrix(params: CoinParams) -> Result<CoinMatrix> {
    if !params.omega.is_finite() || !params.gamma.is_finite() {
        return Err(Error::NonFinite {
            what: "coin parameter",
        });
    }
    let (s, c) = (params.omega / 2.0).sin_cos();
    let phase = Complex64::from_polar(1.0, params.gamma);
    Ok(CoinMatrix([
        [Complex64::new(c, 0.0), phase * s],
        [phase.conj() * s, Complex64::new(-c, 0.0)],
    ]))
}

/// One step of a programmable walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub coin: CoinParams,
    /// Linear power transmission in (0, 1].
    pub transmission: f64,
    pub shift_enabled: bool,
}

impl StepConfig {
    /// Loss of one AR-coated α-BBO crystal.
    pub const DEFAULT_LOSS_DB: f64 = -0.044;

    pub fn new(coin: CoinParams, transmission: f64) -> Result<Self> {
        if !(transmission > 0.0 && transmission <= 1.0) {
            return Err(Error::InvalidTransmission(transmission));
        }
        Ok(Self {
            coin,
            transmission,
            shift_enabled: true,
        })
    }

    pub fn with_loss_db(coin: CoinParams, loss_db: f64) -> Result<Self> {
        Self::new(coin, db_to_linear(loss_db))
    }

    pub fn lossless(coin: CoinParams) -> Self {
        Self {
            coin,
            transmission: 1.0,
            shift_enabled: true,
        }
    }
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            coin: CoinParams::HADAMARD,
            transmission: db_to_linear(Self::DEFAULT_LOSS_DB),
            shift_enabled: true,
        }
    }
}

/// Ordered per-step configuration of an N-step walk.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepSchedule {
    steps: Vec<StepConfig>,
}

impl StepSchedule {
    pub fn new(steps: Vec<StepConfig>) -> Self {
        Self { steps }
    }

    pub fn uniform(count: usize, step: StepConfig) -> Self {
        Self {
            steps: alloc::vec![step; count],
        }
    }

    /// Lossless walk with the balanced coin on every step.
    pub fn hadamard(count: usize) -> Self {
        Self::uniform(count, StepConfig::lossless(CoinParams::HADAMARD))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    #[inline]
    pub fn steps(&self) -> &[StepConfig] {
        &self.steps
    }

    /// Schedule made of the first `count` steps.
    pub fn truncated(&self, count: usize) -> Self {
        Self {
            steps: self.steps[..count.min(self.steps.len())].to_vec(),
        }
    }

    pub fn shift_count(&self) -> usize {
        self.steps.iter().filter(|s| s.shift_enabled).count()
    }

    pub fn is_lossless(&self) -> bool {
        self.steps.iter().all(|s| s.transmission == 1.0)
    }
}

/// Applies the coin to the (H, V) pair of every bin.
pub fn apply_coin(state: &WalkerState, params: CoinParams) -> Result<WalkerState> {
    let coin = coin_matrix(params)?;
    let mut amps = state.amplitudes().to_vec();
    for pair in amps.chunks_exact_mut(2) {
        let (h, v) = coin.apply(pair[0], pair[1]);
        pair[0] = h;
        pair[1] = v;
    }
    Ok(WalkerState::from_raw(state.grid(), amps))
}

/// Moves every V amplitude one bin later; H amplitudes stay.
pub fn apply_shift(state: &WalkerState) -> Result<WalkerState> {
    let grid = state.grid();
    let last = grid.bin_count() - 1;
    if state.amplitude(Polarization::V, last) != Complex64::new(0.0, 0.0) {
        return Err(Error::ShiftOverflow { bin: last });
    }
    let src = state.amplitudes();
    let mut amps = alloc::vec![Complex64::new(0.0, 0.0); src.len()];
    for m in 0..grid.bin_count() {
        amps[2 * m] = src[2 * m];
        if m < last {
            amps[2 * (m + 1) + 1] = src[2 * m + 1];
        }
    }
    Ok(WalkerState::from_raw(grid, amps))
}

/// `sqrt(τ) · S · C` applied to `state`, coin first.
pub fn apply_step(state: &WalkerState, step: &StepConfig) -> Result<WalkerState> {
    if !(step.transmission > 0.0 && step.transmission <= 1.0) {
        return Err(Error::InvalidTransmission(step.transmission));
    }
    let coined = apply_coin(state, step.coin)?;
    let shifted = if step.shift_enabled {
        apply_shift(&coined)?
    } else {
        coined
    };
    if step.transmission == 1.0 {
        return Ok(shifted);
    }
    let amplitude = step.transmission.sqrt();
    let amps = shifted
        .into_amplitudes()
        .into_iter()
        .map(|a| a * amplitude)
        .collect();
    Ok(WalkerState::from_raw(state.grid(), amps))
}

/// States after 0, 1, …, N steps.
pub fn evolve(input: &WalkerState, schedule: &StepSchedule) -> Result<Vec<WalkerState>> {
    evolve_with(input, schedule, Tolerances::DEFAULT)
}

/// [`evolve`] with explicit tolerances for the per-step norm check.
pub fn evolve_with(
    input: &WalkerState,
    schedule: &StepSchedule,
    tol: Tolerances,
) -> Result<Vec<WalkerState>> {
    let grid = input.grid();
    let max_input_bin = input.max_occupied_bin().unwrap_or(0);
    let shifts = schedule.shift_count();
    if max_input_bin + shifts + 1 > grid.bin_count() {
        return Err(Error::UndersizedGrid {
            bin_count: grid.bin_count(),
            steps: shifts,
            max_input_bin,
        });
    }

    let mut history = Vec::with_capacity(schedule.len() + 1);
    history.push(input.clone());
    let mut norm = input.norm_squared();
    for step in schedule.steps() {
        let next = apply_step(history.last().expect("history starts non-empty"), step)?;
        let next_norm = next.norm_squared();
        let drift = (next_norm - step.transmission * norm).abs();
        if drift > tol.conservation {
            return Err(Error::NormDrift { drift });
        }
        norm = next_norm;
        history.push(next);
    }
    Ok(history)
}

/// Smallest grid (same spacing) that fits `schedule` applied to `state`.
pub fn required_bins(state: &WalkerState, schedule: &StepSchedule) -> usize {
    state.max_occupied_bin().unwrap_or(0) + schedule.shift_count() + 1
}
