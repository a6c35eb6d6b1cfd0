#![allow(dead_code)]

use core::f64::consts::TAU;

use proptest::prelude::*;
use timebin_qwalk_core::{BinGrid, CoinParams, Complex64, StepConfig, StepSchedule, WalkerState};

pub fn coin() -> impl Strategy<Value = CoinParams> {
    (0.0..TAU, 0.0..TAU).prop_map(|(omega, gamma)| CoinParams::new(omega, gamma))
}

pub fn lossless_schedule(max_steps: usize) -> impl Strategy<Value = StepSchedule> {
    prop::collection::vec(coin(), 0..=max_steps)
        .prop_map(|coins| StepSchedule::new(coins.into_iter().map(StepConfig::lossless).collect()))
}

pub fn lossy_schedule(max_steps: usize) -> impl Strategy<Value = StepSchedule> {
    prop::collection::vec((coin(), 0.5..=1.0f64), 0..=max_steps).prop_map(|steps| {
        StepSchedule::new(
            steps
                .into_iter()
                .map(|(c, t)| StepConfig::new(c, t).unwrap())
                .collect(),
        )
    })
}

/// Normalized random state occupying bins `0..=max_bin` of `grid`.
pub fn state_on(grid: BinGrid, max_bin: usize) -> impl Strategy<Value = WalkerState> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2 * (max_bin + 1))
        .prop_filter("non-zero", |v| {
            v.iter().any(|&(re, im)| re * re + im * im > 1e-6)
        })
        .prop_map(move |v| {
            let norm = v
                .iter()
                .map(|&(re, im)| re * re + im * im)
                .sum::<f64>()
                .sqrt();
            let mut amps = vec![Complex64::new(0.0, 0.0); grid.dimension()];
            for (a, (re, im)) in amps.iter_mut().zip(v) {
                *a = Complex64::new(re / norm, im / norm);
            }
            WalkerState::from_vector(grid, amps).unwrap()
        })
}

/// A schedule together with a random input that fits its grid.
pub fn schedule_and_input(
    schedule: impl Strategy<Value = StepSchedule>,
    max_input_bin: usize,
) -> impl Strategy<Value = (StepSchedule, WalkerState)> {
    (schedule, 0..=max_input_bin).prop_flat_map(|(s, m)| {
        let grid = BinGrid::for_steps(s.len() + m);
        (Just(s), state_on(grid, m))
    })
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
