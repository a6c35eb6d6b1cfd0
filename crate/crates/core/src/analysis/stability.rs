//! Long-run phase stability under slow drift of the coin parameters.
//!
//! Each step's `γ_n` and `Ω_n` perform independent Gaussian random walks, one
//! increment per sample. At every sample the drifted walk is compared with the
//! undrifted one, separately for the H and V components.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

use super::fidelity;
use crate::error::{Error, Result};
use crate::operators::{evolve, required_bins, CoinParams, StepConfig, StepSchedule};
use crate::prepare::{prepare, InputSpec};
use crate::state::{BinGrid, Distribution, Polarization};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftModel {
    /// Standard deviation of each per-sample `γ` increment, radians.
    pub sigma_gamma: f64,
    /// Standard deviation of each per-sample `Ω` increment, radians.
    pub sigma_omega: f64,
    pub seed: u64,
    pub samples: usize,
    pub sample_interval_h: f64,
}

impl Default for DriftModel {
    fn default() -> Self {
        Self {
            sigma_gamma: 0.0,
            sigma_omega: 0.0,
            seed: 0,
            samples: 50,
            sample_interval_h: 1.0,
        }
    }
}

impl DriftModel {
    fn validate(&self) -> Result<()> {
        if !(self.sigma_gamma >= 0.0 && self.sigma_gamma.is_finite()) {
            return Err(Error::InvalidDrift(
                "sigma_gamma must be finite and non-negative",
            ));
        }
        if !(self.sigma_omega >= 0.0 && self.sigma_omega.is_finite()) {
            return Err(Error::InvalidDrift(
                "sigma_omega must be finite and non-negative",
            ));
        }
        if !(self.sample_interval_h >= 0.0 && self.sample_interval_h.is_finite()) {
            return Err(Error::InvalidDrift(
                "sample interval must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilitySample {
    pub time_h: f64,
    pub fidelity_h: f64,
    pub fidelity_v: f64,
}

/// Fidelity of the `pol` components of two distributions, each renormalized
/// on its own.
pub fn polarization_fidelity(
    measured: &Distribution,
    theory: &Distribution,
    pol: Polarization,
) -> Result<f64> {
    let m = measured
        .component(pol)
        .normalized()
        .map_err(|_| Error::EmptyComponent(pol))?;
    let t = theory
        .component(pol)
        .normalized()
        .map_err(|_| Error::EmptyComponent(pol))?;
    let steps = m.grid().bin_count().max(t.grid().bin_count()) - 1;
    fidelity(&m, &t, steps)
}

/// Accumulated per-step `(Δγ, Δω)` offsets, advanced one sample at a time.
struct DriftWalk {
    rng: ChaCha8Rng,
    gamma: Vec<f64>,
    omega: Vec<f64>,
    sigma_gamma: f64,
    sigma_omega: f64,
}

impl DriftWalk {
    fn new(drift: &DriftModel, steps: usize) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(drift.seed),
            gamma: vec![0.0; steps],
            omega: vec![0.0; steps],
            sigma_gamma: drift.sigma_gamma,
            sigma_omega: drift.sigma_omega,
        }
    }

    /// Adds one increment to every offset; always draws two normals per step.
    fn advance(&mut self) {
        for (g, o) in self.gamma.iter_mut().zip(self.omega.iter_mut()) {
            let dg: f64 = StandardNormal.sample(&mut self.rng);
            let dw: f64 = StandardNormal.sample(&mut self.rng);
            *g += self.sigma_gamma * dg;
            *o += self.sigma_omega * dw;
        }
    }

    fn perturb(&self, schedule: &StepSchedule) -> StepSchedule {
        StepSchedule::new(
            schedule
                .steps()
                .iter()
                .zip(self.gamma.iter().zip(&self.omega))
                .map(|(step, (dg, dw))| StepConfig {
                    coin: CoinParams::new(step.coin.omega + dw, step.coin.gamma + dg),
                    ..*step
                })
                .collect(),
        )
    }
}

struct Baseline {
    input: crate::state::WalkerState,
    theory: Distribution,
}

fn baseline(schedule: &StepSchedule, input: &InputSpec) -> Result<Baseline> {
    let grid = BinGrid::for_steps(input.max_bin() + schedule.shift_count());
    let state = prepare(input, grid)?;
    debug_assert!(required_bins(&state, schedule) <= grid.bin_count());
    let theory = final_distribution(&state, schedule)?;
    Ok(Baseline {
        input: state,
        theory,
    })
}

fn final_distribution(
    input: &crate::state::WalkerState,
    schedule: &StepSchedule,
) -> Result<Distribution> {
    let history = evolve(input, schedule)?;
    Ok(history
        .last()
        .expect("evolve returns the input at least")
        .probabilities())
}

/// Fidelity time series of a walk whose coins drift as `drift` describes.
///
/// Sample `k` sits at `k · sample_interval_h` hours and has accumulated `k`
/// increments; sample 0 is undrifted.
pub fn stability_run(
    schedule: &StepSchedule,
    input: &InputSpec,
    drift: &DriftModel,
) -> Result<Vec<StabilitySample>> {
    drift.validate()?;
    let base = baseline(schedule, input)?;
    let mut walk = DriftWalk::new(drift, schedule.len());
    let mut series = Vec::with_capacity(drift.samples);
    for k in 0..drift.samples {
        if k > 0 {
            walk.advance();
        }
        let measured = final_distribution(&base.input, &walk.perturb(schedule))?;
        series.push(StabilitySample {
            time_h: k as f64 * drift.sample_interval_h,
            fidelity_h: polarization_fidelity(&measured, &base.theory, Polarization::H)?,
            fidelity_v: polarization_fidelity(&measured, &base.theory, Polarization::V)?,
        });
    }
    Ok(series)
}

/// Mean over `seeds` of the worse of the two component fidelities at the
/// last sample.
fn mean_endpoint_fidelity(
    base: &Baseline,
    schedule: &StepSchedule,
    drift: &DriftModel,
    seeds: &[u64],
) -> Result<f64> {
    let mut sum = 0.0;
    for &seed in seeds {
        let mut walk = DriftWalk::new(&DriftModel { seed, ..*drift }, schedule.len());
        for _ in 1..drift.samples {
            walk.advance();
        }
        let measured = final_distribution(&base.input, &walk.perturb(schedule))?;
        let fh = polarization_fidelity(&measured, &base.theory, Polarization::H)?;
        let fv = polarization_fidelity(&measured, &base.theory, Polarization::V)?;
        sum += fh.min(fv);
    }
    Ok(sum / seeds.len() as f64)
}

/// Finds `sigma_gamma` for which the seed-averaged endpoint fidelity (worse
/// polarization) equals `target`, by bisection. Other fields of `drift` are
/// kept.
pub fn calibrate_drift_sigma(
    schedule: &StepSchedule,
    input: &InputSpec,
    drift: &DriftModel,
    target: f64,
    seeds: &[u64],
) -> Result<f64> {
    drift.validate()?;
    if seeds.is_empty() || drift.samples < 2 || !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidDrift(
            "calibration needs seeds, ≥ 2 samples and 0 < target < 1",
        ));
    }
    let base = baseline(schedule, input)?;
    let at = |sigma: f64| {
        mean_endpoint_fidelity(
            &base,
            schedule,
            &DriftModel {
                sigma_gamma: sigma,
                ..*drift
            },
            seeds,
        )
    };

    let (mut lo, mut hi) = (0.0, 1e-3);
    let mut bracketed = false;
    for _ in 0..40 {
        if at(hi)? < target {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !bracketed {
        return Err(Error::InvalidDrift(
            "target fidelity not reached by any sigma",
        ));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if at(mid)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_drift_is_perfect() {
        let drift = DriftModel {
            samples: 5,
            ..DriftModel::default()
        };
        let series = stability_run(
            &StepSchedule::hadamard(18),
            &InputSpec::horizontal(),
            &drift,
        )
        .unwrap();
        assert_eq!(series.len(), 5);
        for (k, s) in series.iter().enumerate() {
            assert_eq!(s.time_h, k as f64);
            assert_eq!(s.fidelity_h, 1.0);
            assert_eq!(s.fidelity_v, 1.0);
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let drift = DriftModel {
            sigma_gamma: 0.01,
            sigma_omega: 0.005,
            seed: 7,
            samples: 10,
            sample_interval_h: 0.5,
        };
        let a =
            stability_run(&StepSchedule::hadamard(6), &InputSpec::horizontal(), &drift).unwrap();
        let b =
            stability_run(&StepSchedule::hadamard(6), &InputSpec::horizontal(), &drift).unwrap();
        assert_eq!(a, b);
        let c = stability_run(
            &StepSchedule::hadamard(6),
            &InputSpec::horizontal(),
            &DriftModel { seed: 8, ..drift },
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_negative_sigma() {
        let drift = DriftModel {
            sigma_gamma: -1.0,
            ..DriftModel::default()
        };
        assert!(
            stability_run(&StepSchedule::hadamard(2), &InputSpec::horizontal(), &drift).is_err()
        );
    }

    #[test]
    fn empty_component_is_reported() {
        let grid = BinGrid::for_steps(1);
        let d = Distribution::from_entries(grid, [(0, Polarization::H, 1.0)]).unwrap();
        assert_eq!(
            polarization_fidelity(&d, &d, Polarization::V),
            Err(Error::EmptyComponent(Polarization::V))
        );
    }
}
