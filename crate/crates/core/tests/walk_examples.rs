use core::f64::consts::{FRAC_1_SQRT_2, PI};

use timebin_qwalk_core::analysis::{peak_asymmetry, peak_separation, variance};
use timebin_qwalk_core::operators::required_bins;
use timebin_qwalk_core::*;
use Polarization::{H, V};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn final_distribution(input: &InputSpec, steps: usize) -> Distribution {
    let grid = BinGrid::for_steps(steps + input.max_bin());
    let input = prepare(input, grid).unwrap();
    evolve(&input, &StepSchedule::hadamard(steps))
        .unwrap()
        .pop()
        .unwrap()
        .probabilities()
}

#[test]
fn two_hadamard_steps() {
    let d = final_distribution(&InputSpec::horizontal(), 2);
    let expected = [(0, H, 0.25), (1, H, 0.25), (1, V, 0.25), (2, V, 0.25)];
    for (bin, pol, p) in expected {
        assert!((d.get(bin, pol) - p).abs() < 1e-15, "({bin},{pol})");
    }
    assert_eq!(d.get(0, V), 0.0);
    assert_eq!(d.get(2, H), 0.0);
    assert!((d.total() - 1.0).abs() < 1e-15);
}

#[test]
fn one_step_examples() {
    let grid = BinGrid::for_steps(1);
    let h = WalkerState::from_entries(grid, [(H, 0, c(1.0, 0.0))]).unwrap();
    let out = apply_step(&h, &StepConfig::lossless(CoinParams::HADAMARD)).unwrap();
    assert!((out.amplitude(H, 0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    assert!((out.amplitude(V, 1) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);

    let lossy = apply_step(
        &h,
        &StepConfig::with_loss_db(CoinParams::HADAMARD, -0.044).unwrap(),
    )
    .unwrap();
    assert!((lossy.norm_squared() - 0.98992).abs() < 1e-5);

    let v = WalkerState::from_entries(grid, [(V, 0, c(1.0, 0.0))]).unwrap();
    let out = apply_step(&v, &StepConfig::lossless(CoinParams::new(0.0, 0.0))).unwrap();
    assert_eq!(out.amplitude(V, 1), c(-1.0, 0.0));
    assert_eq!(out.norm_squared(), 1.0);
}

#[test]
fn zero_steps_return_the_input() {
    let input = prepare(&InputSpec::circular(false), BinGrid::for_steps(0)).unwrap();
    let history = evolve(&input, &StepSchedule::hadamard(0)).unwrap();
    assert_eq!(history, vec![input]);
}

#[test]
fn eighteen_steps_from_h() {
    let d = final_distribution(&InputSpec::horizontal(), 18);
    assert_eq!(d.grid().bin_count(), 19);
    assert!((d.total() - 1.0).abs() < 1e-10);
    assert!(peak_asymmetry(&d).unwrap() > 0.2);

    // H dominates the half of the output nearer t0.
    let (mut h_early, mut v_early) = (0.0, 0.0);
    for bin in 0..9 {
        h_early += d.get(bin, H);
        v_early += d.get(bin, V);
    }
    assert!(h_early > v_early);

    // Ballistic spread: far above the classical 18/4.
    assert!(variance(&d).unwrap() > 4.0 * 4.5);
}

/// The six inputs of the reference figure, 18 steps each.
#[test]
fn six_input_structure() {
    let asymmetric = [
        InputSpec::horizontal(),
        InputSpec::TwoBin { k: 1, nu: 0.0 },
        InputSpec::TwoBin { k: 2, nu: PI },
    ];
    let symmetric = [InputSpec::circular(true), InputSpec::circular(false)];
    let reduced = [
        InputSpec::TwoBin { k: 1, nu: PI },
        InputSpec::TwoBin { k: 2, nu: 0.0 },
    ];

    let mut wide = usize::MAX;
    for input in asymmetric.iter().chain(&symmetric) {
        let d = final_distribution(input, 18);
        wide = wide.min(peak_separation(&d).unwrap());
    }
    for input in &asymmetric {
        let a = peak_asymmetry(&final_distribution(input, 18)).unwrap();
        assert!(a > 0.2, "{input:?}: {a}");
    }
    for input in &symmetric {
        let a = peak_asymmetry(&final_distribution(input, 18)).unwrap();
        assert!(a < 0.02, "{input:?}: {a}");
    }
    for input in &reduced {
        let d = final_distribution(input, 18);
        let sep = peak_separation(&d).unwrap();
        assert!(sep < wide, "{input:?}: {sep} vs {wide}");
    }
    // Same bins, opposite phase: the reduced case spreads less.
    for (k, nu_reduced, nu_split) in [(1, PI, 0.0), (2, 0.0, PI)] {
        let r = variance(&final_distribution(
            &InputSpec::TwoBin { k, nu: nu_reduced },
            18,
        ))
        .unwrap();
        let s = variance(&final_distribution(
            &InputSpec::TwoBin { k, nu: nu_split },
            18,
        ))
        .unwrap();
        assert!(r < s, "k={k}: {r} vs {s}");
    }
}

#[test]
fn circular_inputs_mirror_each_other() {
    let a = final_distribution(&InputSpec::circular(true), 18);
    let b = final_distribution(&InputSpec::circular(false), 18);
    for (x, y) in a.bin_marginal().iter().zip(b.bin_marginal()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn undersized_grid_is_rejected() {
    let input = prepare(&InputSpec::TwoBin { k: 2, nu: 0.0 }, BinGrid::for_steps(4)).unwrap();
    let schedule = StepSchedule::hadamard(3);
    assert_eq!(required_bins(&input, &schedule), 6);
    assert!(matches!(
        evolve(&input, &schedule),
        Err(Error::UndersizedGrid { .. })
    ));
    let padded = input.padded(6).unwrap();
    assert_eq!(evolve(&padded, &schedule).unwrap().len(), 4);
}

#[test]
fn shift_out_of_grid_is_an_error() {
    let grid = BinGrid::for_steps(1);
    let s = WalkerState::from_entries(grid, [(V, 1, c(1.0, 0.0))]).unwrap();
    assert!(matches!(
        apply_shift(&s),
        Err(Error::ShiftOverflow { bin: 1 })
    ));
}

#[test]
fn oracle_of_one_step_has_step_columns() {
    let grid = BinGrid::for_steps(1);
    let step = StepConfig::lossless(CoinParams::HADAMARD);
    let m = dense_walk_oracle(&StepSchedule::uniform(1, step), grid);
    assert_eq!(m.dim(), 4);
    // Basis states in bin 0 stay inside the grid after one step.
    for pol in Polarization::ALL {
        let basis = WalkerState::from_entries(grid, [(pol, 0, c(1.0, 0.0))]).unwrap();
        let out = apply_step(&basis, &step).unwrap();
        let col = pol.index();
        for row in 0..4 {
            assert!((m.get(row, col) - out.amplitudes()[row]).norm() < 1e-15);
        }
    }
}

#[test]
fn oracle_of_five_random_coins_on_twenty_inputs() {
    let coins = [(0.3, 1.1), (2.0, 4.4), (5.9, 0.2), (1.57, 3.2), (4.0, 6.0)];
    let schedule = StepSchedule::new(
        coins
            .iter()
            .map(|&(o, g)| StepConfig::lossless(CoinParams::new(o, g)))
            .collect(),
    );
    let grid = BinGrid::for_steps(6);
    let oracle = dense_walk_oracle(&schedule, grid);
    for seed in 0..20u32 {
        // Deterministic pseudo-random amplitudes on bins 0 and 1.
        let mut x = seed as f64 + 0.5;
        let mut next = || {
            x = (x * 7.13 + 0.37).fract();
            x - 0.5
        };
        let raw: Vec<_> = (0..4).map(|_| c(next(), next())).collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let entries = raw
            .iter()
            .enumerate()
            .map(|(i, a)| (Polarization::ALL[i % 2], i / 2, a / norm));
        let input = WalkerState::from_entries(grid, entries).unwrap();
        let got = evolve(&input, &schedule).unwrap().pop().unwrap();
        let expected = oracle.apply(input.amplitudes());
        for (a, b) in got.amplitudes().iter().zip(&expected) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
