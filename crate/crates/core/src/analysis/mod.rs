//! Figures of merit for walk outputs: fidelity and distance between
//! distributions, spreading (variance) against a classical random walk, loss
//! budgets, and drift-induced stability series.

mod loss;
mod stability;

use alloc::vec::Vec;

#[allow(unused_imports)] // std builds resolve these as inherent methods
use num_traits::Float;

use crate::error::{Error, Result};
use crate::state::{BinGrid, Distribution, Polarization};

pub use loss::{
    db_to_linear, linear_to_db, loss_budget, reference_setup_losses, LossBudget, LossComponent,
    CRYSTAL_LOSS_DB, HIGH_LOSS_CRYSTAL_DB,
};
pub use stability::{
    calibrate_drift_sigma, polarization_fidelity, stability_run, DriftModel, StabilitySample,
};

/// Largest deviation of a distribution's total from 1 accepted by the
/// metrics below.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

fn checked_total(d: &Distribution) -> Result<f64> {
    let total = d.total();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Unnormalized { total });
    }
    Ok(total)
}

/// Overlap fidelity `(Σ_{i≤n} Σ_j √(p_ij q_ij))²` of two normalized
/// distributions, evaluated on the exactly renormalized inputs.
///
/// Bins missing from the shorter grid count as zero.
pub fn fidelity(p: &Distribution, q: &Distribution, steps: usize) -> Result<f64> {
    let total_p = checked_total(p)?;
    let total_q = checked_total(q)?;
    let mut overlap = 0.0;
    for bin in 0..=steps {
        for pol in Polarization::ALL {
            overlap += (p.get(bin, pol) * q.get(bin, pol)).sqrt();
        }
    }
    Ok((overlap * overlap / (total_p * total_q)).min(1.0))
}

/// Total-variation distance `½ Σ |p − q|` over (bin, polarization).
pub fn distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    checked_total(p)?;
    checked_total(q)?;
    let bins = p.grid().bin_count().max(q.grid().bin_count());
    let mut sum = 0.0;
    for bin in 0..bins {
        for pol in Polarization::ALL {
            sum += (p.get(bin, pol) - q.get(bin, pol)).abs();
        }
    }
    Ok((0.5 * sum).min(1.0))
}

/// Variance of the bin index, in bin² units, with polarization summed out.
pub fn variance(dist: &Distribution) -> Result<f64> {
    checked_total(dist)?;
    let (mut mean, mut second) = (0.0, 0.0);
    for (i, p) in dist.bin_marginal().into_iter().enumerate() {
        let x = i as f64;
        mean += x * p;
        second += x * x * p;
    }
    Ok((second - mean * mean).max(0.0))
}

/// Classical walker that stays or advances one bin with probability ½ each:
/// `P(i) = C(n, i) / 2ⁿ` on bins `0..=n`. The mass is stored in the H slot.
pub fn classical_rw_distribution(steps: usize) -> Distribution {
    let grid = BinGrid::for_steps(steps);
    let n = steps as f64;
    let mut flat = alloc::vec![0.0; grid.dimension()];
    if steps <= 1000 {
        // 2^-n is exact here; each ratio C(n, i+1)/C(n, i) = (n − i)/(i + 1).
        let mut p = 0.5_f64.powi(steps as i32);
        for i in 0..=steps {
            flat[2 * i] = p;
            p *= (n - i as f64) / (i + 1) as f64;
        }
    } else {
        // 2^-n underflows; work with ln C(n, i) − n ln 2 instead.
        let mut log_p = -n * core::f64::consts::LN_2;
        for i in 0..=steps {
            if i > 0 {
                log_p += ((n - (i - 1) as f64) / i as f64).ln();
            }
            flat[2 * i] = log_p.exp();
        }
        let total: f64 = flat.iter().sum();
        for x in &mut flat {
            *x /= total;
        }
    }
    Distribution::from_vector(grid, flat).expect("binomial weights are a valid distribution")
}

/// Least-squares slope of `ln(variance)` against `ln(step)` for points with
/// `min_step ≤ step ≤ max_step` and positive variance.
pub fn growth_exponent(points: &[(usize, f64)], min_step: usize, max_step: usize) -> Result<f64> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(n, v)| n >= min_step && n <= max_step && n > 0 && v > 0.0)
        .map(|&(n, v)| ((n as f64).ln(), v.ln()))
        .collect();
    if used.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: used.len(),
        });
    }
    let count = used.len() as f64;
    let mean_x = used.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = used.iter().map(|p| p.1).sum::<f64>() / count;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in &used {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    Ok(sxy / sxx)
}

/// Highest bin on each side of the midpoint of the occupied support,
/// polarization summed out. Ties go to the bin nearer t0.
///
/// `None` if one side is empty.
pub fn peak_bins(dist: &Distribution) -> Option<(usize, usize)> {
    let marginal = dist.bin_marginal();
    let lo = marginal.iter().position(|&p| p > 0.0)?;
    let hi = marginal.iter().rposition(|&p| p > 0.0)?;
    let mid = 0.5 * (lo + hi) as f64;
    let (mut left, mut right) = (None::<usize>, None::<usize>);
    for (i, &p) in marginal.iter().enumerate() {
        let x = i as f64;
        let side = if x < mid {
            &mut left
        } else if x > mid {
            &mut right
        } else {
            continue;
        };
        if side.is_none_or(|j| p > marginal[j]) {
            *side = Some(i);
        }
    }
    Some((left?, right?))
}

/// Imbalance `|P_left − P_right| / (P_left + P_right)` of the two
/// [`peak_bins`].
pub fn peak_asymmetry(dist: &Distribution) -> Option<f64> {
    let (l, r) = peak_bins(dist)?;
    let marginal = dist.bin_marginal();
    let (l, r) = (marginal[l], marginal[r]);
    if l + r == 0.0 {
        return None;
    }
    Some((l - r).abs() / (l + r))
}

/// Distance in bins between the two [`peak_bins`].
pub fn peak_separation(dist: &Distribution) -> Option<usize> {
    peak_bins(dist).map(|(l, r)| r - l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Polarization::{H, V};

    fn dist(bins: usize, entries: &[(usize, Polarization, f64)]) -> Distribution {
        Distribution::from_entries(BinGrid::for_steps(bins - 1), entries.iter().copied()).unwrap()
    }

    #[test]
    fn fidelity_examples() {
        let p = dist(2, &[(0, H, 0.5), (1, V, 0.5)]);
        assert_eq!(fidelity(&p, &p, 1).unwrap(), 1.0);

        let a = dist(2, &[(0, H, 1.0)]);
        let b = dist(2, &[(1, V, 1.0)]);
        assert_eq!(fidelity(&a, &b, 1).unwrap(), 0.0);

        let q = dist(2, &[(0, H, 0.25), (0, V, 0.25), (1, H, 0.25), (1, V, 0.25)]);
        // (√(0.5·0.25) + √(0.5·0.25))² = (2√0.125)² = 0.5
        assert!((fidelity(&p, &q, 1).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(fidelity(&p, &q, 1).unwrap(), fidelity(&q, &p, 1).unwrap());
    }

    #[test]
    fn distance_examples() {
        let p = dist(2, &[(0, H, 0.5), (1, V, 0.5)]);
        let q = dist(2, &[(0, H, 0.25), (0, V, 0.25), (1, H, 0.25), (1, V, 0.25)]);
        assert_eq!(distance(&p, &p).unwrap(), 0.0);
        assert_eq!(
            distance(&dist(2, &[(0, H, 1.0)]), &dist(2, &[(1, V, 1.0)])).unwrap(),
            1.0
        );
        assert!((distance(&p, &q).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn metrics_reject_unnormalized() {
        let p = dist(2, &[(0, H, 0.5)]);
        assert!(matches!(
            fidelity(&p, &p, 1),
            Err(Error::Unnormalized { .. })
        ));
        assert!(matches!(distance(&p, &p), Err(Error::Unnormalized { .. })));
        assert!(matches!(variance(&p), Err(Error::Unnormalized { .. })));
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance(&dist(5, &[(3, V, 1.0)])).unwrap(), 0.0);
        let d = dist(3, &[(0, H, 0.25), (1, H, 0.25), (1, V, 0.25), (2, V, 0.25)]);
        assert!((variance(&d).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn classical_walk() {
        let d0 = classical_rw_distribution(0);
        assert_eq!(d0.get(0, H), 1.0);
        let d2 = classical_rw_distribution(2);
        assert_eq!(d2.bin_marginal(), alloc::vec![0.25, 0.5, 0.25]);
        assert!((variance(&d2).unwrap() - 0.5).abs() < 1e-15);
        assert!((variance(&classical_rw_distribution(18)).unwrap() - 4.5).abs() < 1e-12);
    }

    #[test]
    fn exponent_of_power_laws() {
        let linear: Vec<_> = (1..=20).map(|n| (n, n as f64 / 4.0)).collect();
        assert!((growth_exponent(&linear, 1, 20).unwrap() - 1.0).abs() < 1e-12);
        let quad: Vec<_> = (1..=20).map(|n| (n, 0.3 * (n * n) as f64)).collect();
        assert!((growth_exponent(&quad, 5, 18).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(
            growth_exponent(&quad[..2], 1, 20),
            Err(Error::InsufficientPoints { got: 2, .. })
        ));
    }

    #[test]
    fn asymmetry_of_simple_shapes() {
        let sym = dist(3, &[(0, H, 0.4), (1, H, 0.2), (2, V, 0.4)]);
        assert_eq!(peak_asymmetry(&sym), Some(0.0));
        let skew = dist(3, &[(0, H, 0.6), (1, H, 0.2), (2, V, 0.2)]);
        assert!((peak_asymmetry(&skew).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(peak_asymmetry(&dist(3, &[(1, H, 1.0)])), None);
        assert_eq!(peak_bins(&skew), Some((0, 2)));
        assert_eq!(
            peak_separation(&dist(
                5,
                &[(0, H, 0.1), (1, V, 0.3), (3, H, 0.3), (4, V, 0.3)]
            )),
            Some(2)
        );
    }
}
