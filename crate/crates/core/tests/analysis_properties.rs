use proptest::prelude::*;
use timebin_qwalk_core::analysis::*;
use timebin_qwalk_core::*;

fn distribution(bins: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..1.0f64], 2 * bins)
        .prop_filter("non-zero", |v| v.iter().sum::<f64>() > 1e-3)
        .prop_map(move |v| {
            let total: f64 = v.iter().sum();
            let grid = BinGrid::for_steps(bins - 1);
            Distribution::from_vector(grid, v.into_iter().map(|x| x / total).collect()).unwrap()
        })
}

fn pair() -> impl Strategy<Value = (Distribution, Distribution)> {
    (1usize..12).prop_flat_map(|bins| (distribution(bins), distribution(bins)))
}

fn component() -> impl Strategy<Value = LossComponent> {
    ("[a-z]{1,8}", -5.0..=0.0f64, 1u32..20).prop_map(|(n, db, c)| LossComponent::new(n, db, c))
}

fn walk_variances(input: &InputSpec, max_steps: usize) -> Vec<(usize, f64)> {
    let grid = BinGrid::for_steps(max_steps + input.max_bin());
    let state = prepare(input, grid).unwrap();
    evolve(&state, &StepSchedule::hadamard(max_steps))
        .unwrap()
        .iter()
        .enumerate()
        .map(|(n, s)| (n, variance(&s.probabilities()).unwrap()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fuchs_van_de_graaf((p, q) in pair()) {
        let steps = p.grid().bin_count() - 1;
        let f = fidelity(&p, &q, steps).unwrap();
        let d = distance(&p, &q).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!(1.0 - f.sqrt() <= d + 1e-12);
        prop_assert!(d <= (1.0 - f).max(0.0).sqrt() + 1e-12);
        prop_assert_eq!(f, fidelity(&q, &p, steps).unwrap());
        prop_assert_eq!(d, distance(&q, &p).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn self_comparison_is_exact(p in (1usize..20).prop_flat_map(distribution)) {
        let steps = p.grid().bin_count() - 1;
        prop_assert_eq!(fidelity(&p, &p, steps).unwrap(), 1.0);
        prop_assert_eq!(distance(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn loss_is_additive_in_db(
        a in prop::collection::vec(component(), 0..8),
        b in prop::collection::vec(component(), 0..8),
    ) {
        let joined: Vec<_> = a.iter().chain(&b).cloned().collect();
        let total = loss_budget(&joined).unwrap().total_db;
        let parts = loss_budget(&a).unwrap().total_db + loss_budget(&b).unwrap().total_db;
        prop_assert!((total - parts).abs() < 1e-12);
        let budget = loss_budget(&joined).unwrap();
        prop_assert!((budget.efficiency - 10f64.powf(budget.total_db / 10.0)).abs() < 1e-12);
    }
}

#[test]
fn classical_variance_is_a_quarter_of_n() {
    for n in (0..=60).chain([500, 999, 1000, 1001, 5000]) {
        let v = variance(&classical_rw_distribution(n)).unwrap();
        assert!(
            (v - n as f64 / 4.0).abs() <= 1e-12 * (n as f64).max(1.0),
            "n={n}: {v}"
        );
    }
}

#[test]
fn classical_exponent_is_one() {
    let points: Vec<_> = (1..=30)
        .map(|n| (n, variance(&classical_rw_distribution(n)).unwrap()))
        .collect();
    assert!((growth_exponent(&points, 5, 30).unwrap() - 1.0).abs() < 0.01);
}

#[test]
fn quantum_spreads_faster_than_classical() {
    for (n, v) in walk_variances(&InputSpec::horizontal(), 30)
        .into_iter()
        .skip(4)
    {
        let classical = variance(&classical_rw_distribution(n)).unwrap();
        assert!(v > classical, "n={n}: {v} vs {classical}");
    }
}

#[test]
fn symmetric_input_grows_quadratically() {
    for positive in [true, false] {
        let points = walk_variances(&InputSpec::circular(positive), 18);
        let exponent = growth_exponent(&points, 5, 18).unwrap();
        assert!((exponent - 2.0).abs() < 0.15, "{exponent}");
    }
}

#[test]
fn two_step_variance_matches_classical() {
    let quantum = walk_variances(&InputSpec::horizontal(), 2)[2].1;
    assert!((quantum - 0.5).abs() < 1e-15);
    assert!((variance(&classical_rw_distribution(2)).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn drift_lowers_expected_fidelity() {
    let schedule = StepSchedule::hadamard(18);
    let input = InputSpec::horizontal();
    let samples = 12;
    let seeds = 200u64;
    let mut mean = vec![0.0; samples];
    for seed in 0..seeds {
        let drift = DriftModel {
            sigma_gamma: 0.02,
            sigma_omega: 0.01,
            seed,
            samples,
            sample_interval_h: 1.0,
        };
        for (k, s) in stability_run(&schedule, &input, &drift)
            .unwrap()
            .iter()
            .enumerate()
        {
            mean[k] += 0.5 * (s.fidelity_h + s.fidelity_v) / seeds as f64;
        }
    }
    assert!((mean[0] - 1.0).abs() < 1e-12);
    for w in mean.windows(2) {
        assert!(w[1] <= w[0], "{mean:?}");
    }
    assert!(mean[samples - 1] < 0.999);
}

#[test]
fn calibrated_drift_stays_above_ninety_five_percent() {
    let schedule = StepSchedule::hadamard(18);
    let input = InputSpec::horizontal();
    let base = DriftModel {
        samples: 50,
        sigma_omega: 0.0,
        ..DriftModel::default()
    };
    let seeds: Vec<u64> = (0..32).collect();
    let sigma = calibrate_drift_sigma(&schedule, &input, &base, 0.97, &seeds).unwrap();
    assert!(sigma > 0.0);

    // Fresh seeds: the expected series and the median run stay above 0.95.
    let held_out = 100..200u64;
    let count = held_out.clone().count() as f64;
    let mut mean_h = vec![0.0; 50];
    let mut mean_v = vec![0.0; 50];
    let mut minima = Vec::new();
    for seed in held_out {
        let series = stability_run(
            &schedule,
            &input,
            &DriftModel {
                sigma_gamma: sigma,
                seed,
                ..base
            },
        )
        .unwrap();
        assert_eq!(series.len(), 50);
        for (k, s) in series.iter().enumerate() {
            mean_h[k] += s.fidelity_h / count;
            mean_v[k] += s.fidelity_v / count;
        }
        minima.push(
            series
                .iter()
                .map(|s| s.fidelity_h.min(s.fidelity_v))
                .fold(1.0, f64::min),
        );
    }
    assert!(
        mean_h.iter().chain(&mean_v).all(|&f| f > 0.95),
        "{mean_h:?} {mean_v:?}"
    );
    let end = mean_h[49].min(mean_v[49]);
    assert!((end - 0.97).abs() < 0.015, "{end}");
    minima.sort_by(f64::total_cmp);
    assert!(minima[minima.len() / 2] > 0.95, "{minima:?}");
}

#[test]
fn reference_budget() {
    let one = loss_budget(&[LossComponent::new("crystal", CRYSTAL_LOSS_DB, 1)]).unwrap();
    assert!((one.efficiency - 0.98992).abs() < 1e-5);
    let all = loss_budget(&reference_setup_losses(18)).unwrap();
    assert!((all.total_db + 8.201).abs() < 1e-3);
    assert!((all.efficiency - 0.151).abs() < 1e-3);
}
