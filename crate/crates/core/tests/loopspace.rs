mod common;

use casimir_core::loopspace::*;
use casimir_core::par::Execution;
use casimir_core::potentials::self_energy_coulomb;
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn covariance_matches_exact_bridge_at_random_pairs() {
    let sampler = BridgeSampler::new(1, 16, 2024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = vec![(8, 8), (4, 12)];
    while pairs.len() < 10 {
        pairs.push((rng.gen_range(1..16), rng.gen_range(1..16)));
    }
    let report = empirical_covariance(&sampler, &pairs, 100_000, Execution::Parallel).unwrap();
    assert_eq!(report[0].exact, 0.25);
    assert_eq!(report[1].exact, 0.0625);
    for c in &report {
        assert!(c.z_score() < 3.0, "{c:?}");
    }
}

#[test]
fn multi_winding_covariance() {
    let sampler = BridgeSampler::new(3, 4, 77).unwrap();
    let pairs = [(2, 9), (6, 6), (11, 3)];
    for c in empirical_covariance(&sampler, &pairs, 40_000, Execution::Parallel).unwrap() {
        assert!(c.z_score() < 3.5, "{c:?}");
    }
    assert_eq!(bridge_covariance(3, 1.5, 1.5), 1.5 - 0.75);
}

#[test]
fn ensemble_is_order_independent() {
    let s = BridgeSampler::new(2, 8, 3).unwrap();
    let par = s.ensemble(Execution::Parallel, 10, 64);
    let seq = s.ensemble(Execution::Sequential, 10, 64);
    assert_eq!(par, seq);
    assert_eq!(par[5], s.sample(15));
}

#[test]
fn odd_line_integral_averages_to_zero() {
    let s = BridgeSampler::new(1, 16, 8).unwrap();
    let vals: Vec<f64> = (0..4000)
        .map(|i| line_integral(&s.sample(i), 16, |_, x: &Vec3| *x).unwrap())
        .collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
    assert!(mean.abs() < 4.0 * (var / vals.len() as f64).sqrt());
}

#[test]
fn off_grid_shift_is_rejected() {
    let t = thermo(5.0);
    let sp = species("ion", 1.0, 10.0, &t);
    let lp = sampled_loop(&sp, 1, 8, 1, 0, [0.0; 3]);
    assert!(shift_origin(&lp, 0.3).is_err());
}

#[test]
fn path_serialization_round_trips() {
    let path = sample_bridge(2, 8, 4).unwrap();
    let bytes = path_to_bytes(8, 2, &path);
    let (n, p, back) = path_from_bytes(&bytes).unwrap();
    assert_eq!((n, p), (8, 2));
    assert_eq!(back, path);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampled_bridges_are_closed_and_deterministic(p in 1u32..4, n in 2u32..24, seed in any::<u64>(), idx in 0u64..1000) {
        let s = BridgeSampler::new(p, n, seed).unwrap();
        let a = s.sample(idx);
        prop_assert_eq!(a.len(), (p * n + 1) as usize);
        prop_assert_eq!(a[0], [0.0; 3]);
        prop_assert_eq!(*a.last().unwrap(), [0.0; 3]);
        prop_assert_eq!(a, s.sample(idx));
    }

    #[test]
    fn constant_integrands_vanish_exactly(seed in any::<u64>(), c in prop::array::uniform3(-10.0f64..10.0)) {
        let path = sample_bridge(2, 12, seed).unwrap();
        prop_assert_eq!(line_integral(&path, 12, |_, _| c).unwrap(), 0.0);
    }

    #[test]
    fn shifting_preserves_points_and_activity(seed in 0u64..500, m in 0usize..16, p in 1u32..3) {
        let t = thermo(5.0);
        let sp = species("ion", 1.0, 10.0, &t);
        let lp = sampled_loop(&sp, p, 8, seed, 0, [0.3, -0.2, 1.0]);
        let sh = shift_origin(&lp, (m % lp.n_periodic()) as f64 / 8.0).unwrap();
        prop_assert_eq!(sh.path[0], [0.0; 3]);
        prop_assert_eq!(*sh.path.last().unwrap(), [0.0; 3]);
        let key = |v: Vec3| [(v[0] * 1e9).round() as i64, (v[1] * 1e9).round() as i64, (v[2] * 1e9).round() as i64];
        let mut a: Vec<_> = (0..lp.n_periodic()).map(|k| key(lp.point_at(k))).collect();
        let mut b: Vec<_> = (0..sh.n_periodic()).map(|k| key(sh.point_at(k))).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        let za = loop_activity(&lp, &t, self_energy_coulomb(&lp)).unwrap();
        let zb = loop_activity(&sh, &t, self_energy_coulomb(&sh)).unwrap();
        prop_assert!((za - zb).abs() <= 1e-12 * za.abs());
    }
}
