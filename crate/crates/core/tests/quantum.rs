mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qunit_ghz::quantum::*;
use qunit_ghz::{ExperimentConfig, LocalSetting, Outcome, Turn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SUM_TOL: f64 = 1e-9;
const TERM_TOL: f64 = 1e-12;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[test]
fn joint_probabilities_match_dense_simulation() {
    // values frozen from the dense oracle
    let c = ExperimentConfig::zero_phases(2, 2).unwrap();
    assert!((joint_probability(&c, &Outcome(vec![1, 1])).unwrap() - 0.5).abs() < TERM_TOL);
    assert!(joint_probability(&c, &Outcome(vec![1, 2])).unwrap().abs() < TERM_TOL);
    let c = ExperimentConfig::zero_phases(3, 3).unwrap();
    assert!((joint_probability(&c, &Outcome(vec![1, 1, 1])).unwrap() - 1.0 / 9.0).abs() < TERM_TOL);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (dim, parties) in [(2, 3), (3, 2), (3, 4), (4, 3), (5, 2), (2, 6)] {
        let config = random_config(&mut rng, dim, parties);
        let dense = dense_distribution(&config);
        let ours = outcome_distribution(&config, DEFAULT_OUTCOME_CAP).unwrap();
        assert_eq!(dense.len(), ours.len());
        for (p, (o, q)) in dense.iter().zip(&ours) {
            assert!((p - q).abs() < SUM_TOL, "{o:?}: dense {p}, ours {q}");
            assert!((joint_probability(&config, o).unwrap() - q).abs() < TERM_TOL);
        }
        assert!(
            (dense_correlation(&config) - correlation_closed(&config).unwrap()).norm() < SUM_TOL
        );
    }
}

#[test]
fn zero_phase_distributions() {
    let d = outcome_distribution(&ExperimentConfig::zero_phases(2, 2).unwrap(), 100).unwrap();
    let probs: Vec<f64> = d.iter().map(|(_, p)| *p).collect();
    for (p, want) in probs.iter().zip([0.5, 0.0, 0.0, 0.5]) {
        assert!((p - want).abs() < SUM_TOL);
    }
    let d = outcome_distribution(&ExperimentConfig::zero_phases(3, 3).unwrap(), 100).unwrap();
    for (o, p) in &d {
        let want = if o.bell_exponent(3) == 0 {
            1.0 / 9.0
        } else {
            0.0
        };
        assert!((p - want).abs() < SUM_TOL, "{o:?}");
    }
}

#[test]
fn zero_phases_are_perfectly_correlated() {
    for dim in 1..=6 {
        for parties in 1..=4 {
            let c = ExperimentConfig::zero_phases(dim, parties).unwrap();
            assert!((correlation_closed(&c).unwrap() - one()).norm() < TERM_TOL);
            assert!(
                (correlation_direct(&c, DEFAULT_OUTCOME_CAP).unwrap() - one()).norm() < SUM_TOL
            );
        }
    }
}

#[test]
fn three_qutrit_values() {
    let phi = turns(&[(0, 1), (1, 6), (1, 3)]);
    let zero = LocalSetting::zeros(3);
    let run = ExperimentConfig::new(3, vec![phi.clone(), phi.clone(), zero]).unwrap();
    let alpha2 = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI / 3.0);
    assert!((correlation_direct(&run, DEFAULT_OUTCOME_CAP).unwrap() - alpha2).norm() < SUM_TOL);
    assert!((correlation_closed(&run).unwrap() - alpha2).norm() < TERM_TOL);
    let probe = ExperimentConfig::new(3, vec![phi.clone(), phi.clone(), phi]).unwrap();
    assert!(
        (correlation_closed(&probe).unwrap() - Complex64::new(-1.0 / 3.0, 0.0)).norm() < TERM_TOL
    );
}

#[test]
fn mach_zehnder_cosine() {
    for k in 0..24 {
        let theta = Turn::from_fraction(k, 24).unwrap();
        let c = ExperimentConfig::new(2, vec![LocalSetting(vec![theta, Turn::ZERO])]).unwrap();
        let e = correlation_closed(&c).unwrap();
        assert!((e - Complex64::new(theta.radians().cos(), 0.0)).norm() < TERM_TOL);
        let d = correlation_direct(&c, 10).unwrap();
        assert!((d - e).norm() < SUM_TOL);
    }
}

#[test]
fn perfect_correlation_fixes_the_remote_detector() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = 0;
    for _ in 0..400 {
        let dim = rand::Rng::gen_range(&mut rng, 2..=4);
        let parties = rand::Rng::gen_range(&mut rng, 2..=4);
        // settings on a coarse grid hit perfect correlations often
        let settings = (0..parties)
            .map(|_| {
                LocalSetting(
                    (0..dim)
                        .map(|_| {
                            Turn::from_fraction(
                                rand::Rng::gen_range(&mut rng, 0..dim as i64),
                                dim as i64,
                            )
                            .unwrap()
                        })
                        .collect(),
                )
            })
            .collect();
        let c = ExperimentConfig::new(dim, settings).unwrap();
        let Some(value) = perfect_correlation_value(&c).unwrap() else {
            continue;
        };
        seen += 1;
        assert!((correlation_closed(&c).unwrap() - value.to_complex()).norm() < TERM_TOL);
        for (o, p) in outcome_distribution(&c, DEFAULT_OUTCOME_CAP).unwrap() {
            if o.bell_exponent(dim) == value.exponent {
                assert!(p > 1e-9, "{o:?}");
            } else {
                assert!(p < 1e-12, "{o:?}");
            }
            let partial = &o.0[..parties - 1];
            let k = predict_remote_outcome(&c, partial).unwrap();
            let mut full = partial.to_vec();
            full.push(k);
            assert!(joint_probability(&c, &Outcome(full)).unwrap() > 1e-9);
        }
    }
    assert!(
        seen > 20,
        "only {seen} perfectly correlated configs sampled"
    );
}

#[test]
fn random_configs_without_perfect_correlation_have_modulus_below_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let c = random_config(&mut rng, 3, 3);
        let e = correlation_closed(&c).unwrap();
        if perfect_correlation_value(&c).unwrap().is_none() {
            assert!(e.norm() < 1.0 - 1e-9);
        }
    }
}

fn config_strategy() -> impl Strategy<Value = ExperimentConfig> {
    (2usize..=5, 1usize..=5, any::<u64>()).prop_map(|(dim, parties, seed)| {
        random_config(&mut ChaCha8Rng::seed_from_u64(seed), dim, parties)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn direct_equals_closed(c in config_strategy()) {
        let direct = correlation_direct(&c, DEFAULT_OUTCOME_CAP).unwrap();
        let closed = correlation_closed(&c).unwrap();
        prop_assert!((direct - closed).norm() <= SUM_TOL);
        prop_assert!(closed.norm() <= 1.0 + TERM_TOL);
        let total: f64 = outcome_distribution(&c, DEFAULT_OUTCOME_CAP).unwrap().iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() <= SUM_TOL);
    }

    #[test]
    fn common_offset_is_invisible(c in config_strategy(), party_seed in any::<usize>(), shift_seed in any::<u64>()) {
        let party = party_seed % c.parties;
        let shift = random_turn(&mut ChaCha8Rng::seed_from_u64(shift_seed), 30);
        let mut shifted = c.clone();
        shifted.settings[party] = c.settings[party].offset(shift).unwrap();
        prop_assert!((correlation_closed(&c).unwrap() - correlation_closed(&shifted).unwrap()).norm() <= TERM_TOL);
        prop_assert!((correlation_direct(&c, DEFAULT_OUTCOME_CAP).unwrap()
            - correlation_direct(&shifted, DEFAULT_OUTCOME_CAP).unwrap()).norm() <= TERM_TOL);
        let a = outcome_distribution(&c, DEFAULT_OUTCOME_CAP).unwrap();
        let b = outcome_distribution(&shifted, DEFAULT_OUTCOME_CAP).unwrap();
        for ((_, p), (_, q)) in a.iter().zip(&b) {
            prop_assert!((p - q).abs() <= TERM_TOL);
        }
        prop_assert_eq!(perfect_correlation_value(&c).unwrap(), perfect_correlation_value(&shifted).unwrap());
    }

    #[test]
    fn two_ports_give_the_multi_qubit_cosine(parties in 1usize..=6, seed in any::<u64>()) {
        let c = random_config(&mut ChaCha8Rng::seed_from_u64(seed), 2, parties);
        let want = two_port_phase_sum(&c).cos();
        prop_assert!((correlation_closed(&c).unwrap() - Complex64::new(want, 0.0)).norm() <= TERM_TOL);
    }

    #[test]
    fn phased_state_keeps_its_norm(c in config_strategy()) {
        let s = apply_phases(&ghz_state(c.dim, c.parties).unwrap(), &c).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() <= TERM_TOL);
        for a in s.diagonal() {
            prop_assert!((a.norm() - 1.0 / (c.dim as f64).sqrt()).abs() <= TERM_TOL);
        }
    }
}
