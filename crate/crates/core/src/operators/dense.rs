//! Explicit-matrix form of the walk, used to cross-check [`super::evolve`].
//!
//! Every step is assembled as full `2B × 2B` coin and shift matrices from
//! their operator sums and multiplied out; nothing here reuses the in-place
//! update code.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // std builds resolve these as inherent methods
use num_traits::Float;

use super::{StepConfig, StepSchedule};
use crate::state::BinGrid;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    /// `self · v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch");
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Full matrix of one step, `sqrt(τ) · S · C`, on `grid`.
///
/// Basis index of `(pol, m)` is `2m + pol`. V amplitude in the last bin has
/// nowhere to go, so that column of `S` is zero.
pub fn step_matrix(step: &StepConfig, grid: BinGrid) -> DenseMatrix {
    let bins = grid.bin_count();
    let dim = 2 * bins;

    let half = step.coin.omega / 2.0;
    let (cos, sin) = (half.cos(), half.sin());
    let e_plus = Complex64::new(step.coin.gamma.cos(), step.coin.gamma.sin());
    let e_minus = Complex64::new(step.coin.gamma.cos(), -step.coin.gamma.sin());

    let mut coin = DenseMatrix::zeros(dim);
    for m in 0..bins {
        let (h, v) = (2 * m, 2 * m + 1);
        coin.set(h, h, Complex64::new(cos, 0.0));
        coin.set(h, v, e_plus * sin);
        coin.set(v, h, e_minus * sin);
        coin.set(v, v, Complex64::new(-cos, 0.0));
    }

    let mut shift = DenseMatrix::zeros(dim);
    for m in 0..bins {
        if step.shift_enabled {
            shift.set(2 * m, 2 * m, Complex64::new(1.0, 0.0));
            if m + 1 < bins {
                shift.set(2 * (m + 1) + 1, 2 * m + 1, Complex64::new(1.0, 0.0));
            }
        } else {
            shift.set(2 * m, 2 * m, Complex64::new(1.0, 0.0));
            shift.set(2 * m + 1, 2 * m + 1, Complex64::new(1.0, 0.0));
        }
    }

    let mut u = shift.matmul(&coin);
    let amp = step.transmission.sqrt();
    for x in &mut u.data {
        *x *= amp;
    }
    u
}

/// `U_N ⋯ U_2 · U_1` as an explicit matrix.
pub fn dense_walk_oracle(schedule: &StepSchedule, grid: BinGrid) -> DenseMatrix {
    schedule
        .steps()
        .iter()
        .fold(DenseMatrix::identity(grid.dimension()), |acc, step| {
            step_matrix(step, grid).matmul(&acc)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{apply_step, CoinParams};
    use crate::state::{Polarization, WalkerState};

    #[test]
    fn empty_schedule_is_identity() {
        let grid = BinGrid::for_steps(3);
        assert_eq!(
            dense_walk_oracle(&StepSchedule::default(), grid),
            DenseMatrix::identity(8)
        );
    }

    #[test]
    fn one_step_columns_match_apply_step() {
        let grid = BinGrid::for_steps(1);
        let step = StepConfig::lossless(CoinParams::HADAMARD);
        let u = dense_walk_oracle(&StepSchedule::new(alloc::vec![step]), grid);
        assert_eq!(u.dim(), 4);
        // Only the bin-0 basis states have room to shift on a 2-bin grid.
        for pol in Polarization::ALL {
            let e = WalkerState::from_entries(grid, [(pol, 0, Complex64::new(1.0, 0.0))]).unwrap();
            let out = apply_step(&e, &step).unwrap();
            let col = pol.index();
            for row in 0..4 {
                assert!((u.get(row, col) - out.amplitudes()[row]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn loss_scales_matrix() {
        let grid = BinGrid::for_steps(2);
        let lossless = step_matrix(&StepConfig::lossless(CoinParams::new(0.3, 0.9)), grid);
        let lossy = step_matrix(
            &StepConfig::new(CoinParams::new(0.3, 0.9), 0.81).unwrap(),
            grid,
        );
        for r in 0..6 {
            for c in 0..6 {
                assert!((lossy.get(r, c) - lossless.get(r, c) * 0.9).norm() < 1e-15);
            }
        }
    }
}
