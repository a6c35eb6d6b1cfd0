//! Walker states on the polarization ⊗ time-bin space.
//!
//! Amplitudes are stored densely, two per bin (H then V), so the flat index of
//! `(pol, m)` is `2 * m + pol.index()`. An `N`-step walk from a single input bin
//! needs `N + 1` bins because each step reaches at most one new bin.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polarization basis state, which plays the role of the coin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::H, Polarization::V];

    #[inline]
    pub const fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    pub const fn other(self) -> Polarization {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

/// Numerical tolerances shared by the state types and the evolution checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Slack allowed above unit squared norm (or unit total probability).
    pub norm: f64,
    /// Allowed change of the squared norm across one lossless step.
    pub conservation: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        norm: 1e-9,
        conservation: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Uniform grid of time bins; bin `m` arrives at `m * spacing_ps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinGrid {
    spacing_ps: f64,
    bin_count: usize,
}

impl BinGrid {
    /// Bin separation produced by a 10 mm α-BBO crystal at 720 nm.
    pub const DEFAULT_SPACING_PS: f64 = 4.3;

    pub fn new(spacing_ps: f64, bin_count: usize) -> Result<Self> {
        if !spacing_ps.is_finite() || spacing_ps <= 0.0 {
            return Err(Error::InvalidGrid(
                "bin spacing must be positive and finite",
            ));
        }
        if bin_count == 0 {
            return Err(Error::InvalidGrid("bin count must be positive"));
        }
        Ok(Self {
            spacing_ps,
            bin_count,
        })
    }

    /// Grid with the default spacing and room for `steps` steps from bin 0.
    pub fn for_steps(steps: usize) -> Self {
        Self {
            spacing_ps: Self::DEFAULT_SPACING_PS,
            bin_count: steps + 1,
        }
    }

    /// Same spacing, different size.
    pub fn with_bin_count(self, bin_count: usize) -> Result<Self> {
        Self::new(self.spacing_ps, bin_count)
    }

    #[inline]
    pub fn spacing_ps(&self) -> f64 {
        self.spacing_ps
    }

    #[inline]
    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    /// Number of (polarization, bin) basis states.
    #[inline]
    pub fn dimension(&self) -> usize {
        2 * self.bin_count
    }

    #[inline]
    pub fn delay_ps(&self, bin: usize) -> f64 {
        bin as f64 * self.spacing_ps
    }

    #[inline]
    pub(crate) fn flat(pol: Polarization, bin: usize) -> usize {
        2 * bin + pol.index()
    }

    fn check_bin(&self, bin: usize) -> Result<()> {
        if bin < self.bin_count {
            Ok(())
        } else {
            Err(Error::BinOutOfRange {
                bin,
                bin_count: self.bin_count,
            })
        }
    }
}

/// Pure single-photon amplitude over (polarization, time bin).
///
/// The squared norm may be below one once loss has been applied but never
/// exceeds `1 + Tolerances::norm`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    grid: BinGrid,
    amplitudes: Vec<Complex64>,
}

impl WalkerState {
    /// The empty superposition.
    pub fn zero(grid: BinGrid) -> Self {
        Self {
            grid,
            amplitudes: vec![Complex64::new(0.0, 0.0); grid.dimension()],
        }
    }

    /// Builds a state from `(polarization, bin, amplitude)` entries.
    ///
    /// Repeated `(polarization, bin)` pairs are summed. Nothing is normalized.
    pub fn from_entries<I>(grid: BinGrid, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Polarization, usize, Complex64)>,
    {
        let mut state = Self::zero(grid);
        for (pol, bin, amp) in entries {
            grid.check_bin(bin)?;
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::NonFinite { what: "amplitude" });
            }
            state.amplitudes[BinGrid::flat(pol, bin)] += amp;
        }
        state.validate(Tolerances::DEFAULT)?;
        Ok(state)
    }

    /// Builds a state from a flat amplitude vector in `2 * bin + pol` order.
    pub fn from_vector(grid: BinGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.dimension() {
            return Err(Error::InvalidGrid(
                "amplitude vector length does not match grid",
            ));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite { what: "amplitude" });
        }
        let state = Self { grid, amplitudes };
        state.validate(Tolerances::DEFAULT)?;
        Ok(state)
    }

    pub(crate) fn from_raw(grid: BinGrid, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), grid.dimension());
        Self { grid, amplitudes }
    }

    fn validate(&self, tol: Tolerances) -> Result<()> {
        let norm_squared = self.norm_squared();
        if norm_squared > 1.0 + tol.norm {
            return Err(Error::NormExceeded {
                norm_squared,
                tolerance: tol.norm,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn grid(&self) -> BinGrid {
        self.grid
    }

    #[inline]
    pub fn amplitude(&self, pol: Polarization, bin: usize) -> Complex64 {
        self.amplitudes[BinGrid::flat(pol, bin)]
    }

    /// Flat amplitude table in `2 * bin + pol` order.
    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Highest bin holding a nonzero amplitude in either polarization.
    pub fn max_occupied_bin(&self) -> Option<usize> {
        (0..self.grid.bin_count).rev().find(|&m| {
            Polarization::ALL
                .iter()
                .any(|&p| self.amplitude(p, m) != Complex64::new(0.0, 0.0))
        })
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Result<Self> {
        Self::from_vector(
            self.grid,
            self.amplitudes.iter().map(|a| a * factor).collect(),
        )
    }

    /// Copy on a larger grid with the same spacing; amplitudes keep their bins.
    pub fn padded(&self, bin_count: usize) -> Result<Self> {
        if bin_count < self.grid.bin_count {
            return Err(Error::InvalidGrid("padding cannot shrink the grid"));
        }
        let grid = self.grid.with_bin_count(bin_count)?;
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(grid.dimension(), Complex64::new(0.0, 0.0));
        Ok(Self { grid, amplitudes })
    }

    /// Born-rule probabilities of every (bin, polarization) outcome.
    pub fn probabilities(&self) -> Distribution {
        Distribution {
            grid: self.grid,
            probabilities: self.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        }
    }
}

/// Probabilities over (time bin, polarization), the discretized walk output.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    grid: BinGrid,
    probabilities: Vec<f64>,
}

impl Distribution {
    /// Builds a distribution from a flat vector in `2 * bin + pol` order.
    pub fn from_vector(grid: BinGrid, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != grid.dimension() {
            return Err(Error::InvalidGrid(
                "probability vector length does not match grid",
            ));
        }
        for &p in &probabilities {
            if !p.is_finite() {
                return Err(Error::NonFinite {
                    what: "probability",
                });
            }
            if p < 0.0 {
                return Err(Error::NegativeProbability(p));
            }
        }
        let dist = Self {
            grid,
            probabilities,
        };
        let total = dist.total();
        if total > 1.0 + Tolerances::DEFAULT.norm {
            return Err(Error::Unnormalized { total });
        }
        Ok(dist)
    }

    /// Builds a distribution from `(bin, polarization, probability)` entries.
    pub fn from_entries<I>(grid: BinGrid, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Polarization, f64)>,
    {
        let mut probabilities = vec![0.0; grid.dimension()];
        for (bin, pol, p) in entries {
            grid.check_bin(bin)?;
            probabilities[BinGrid::flat(pol, bin)] += p;
        }
        Self::from_vector(grid, probabilities)
    }

    /// Like [`from_vector`](Self::from_vector) but without the unit-sum cap,
    /// for unnormalized readout signals.
    pub(crate) fn from_raw(grid: BinGrid, probabilities: Vec<f64>) -> Self {
        debug_assert_eq!(probabilities.len(), grid.dimension());
        Self {
            grid,
            probabilities,
        }
    }

    #[inline]
    pub fn grid(&self) -> BinGrid {
        self.grid
    }

    #[inline]
    pub fn get(&self, bin: usize, pol: Polarization) -> f64 {
        self.probabilities
            .get(BinGrid::flat(pol, bin))
            .copied()
            .unwrap_or(0.0)
    }

    /// Flat table in `2 * bin + pol` order.
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Probability per bin, summed over polarization.
    pub fn bin_marginal(&self) -> Vec<f64> {
        self.probabilities
            .chunks_exact(2)
            .map(|pair| pair[0] + pair[1])
            .collect()
    }

    /// Entries in (bin, H before V) order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Polarization, f64)> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, &p)| (i / 2, Polarization::ALL[i % 2], p))
    }

    /// The `pol` component alone; the other polarization is zeroed.
    pub fn component(&self, pol: Polarization) -> Distribution {
        let probabilities = self
            .probabilities
            .iter()
            .enumerate()
            .map(|(i, &p)| if i % 2 == pol.index() { p } else { 0.0 })
            .collect();
        Self::from_raw(self.grid, probabilities)
    }

    /// Rescaled to unit total.
    pub fn normalized(&self) -> Result<Distribution> {
        let total = self.total();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::Unnormalized { total });
        }
        Ok(Self::from_raw(
            self.grid,
            self.probabilities.iter().map(|p| p / total).collect(),
        ))
    }

    /// Elementwise sum with another distribution on the same grid.
    pub fn merged(&self, other: &Distribution) -> Result<Distribution> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.grid.spacing_ps,
                right: other.grid.spacing_ps,
            });
        }
        Ok(Self::from_raw(
            self.grid,
            self.probabilities
                .iter()
                .zip(&other.probabilities)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }
}
