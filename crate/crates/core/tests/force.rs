mod common;

use std::f64::consts::PI;
use std::time::Instant;

use casimir_core::fit::fit_power_law;
use casimir_core::force::*;
use casimir_core::loopspace::ThermoState;
use casimir_core::par::Execution;
use casimir_core::potentials::{magnetic_capacitor_decay, FormFactor, MagneticModel};
use casimir_core::screening::{leading_ursell, KSequence};
use casimir_core::special::ZETA3;
use common::*;
use proptest::prelude::*;

#[test]
fn zeta3_quadrature_matches_series_oracle() {
    let start = Instant::now();
    let q = zeta3_quadrature();
    let s = zeta3_series(1_000_000);
    let elapsed = start.elapsed();
    assert!((q.value - s.value).abs() < 1e-10, "{} vs {}", q.value, s.value);
    assert!(s.tail_uncertainty < 1e-12);
    assert!((q.value - ZETA3 / 2.0).abs() < 1e-12);
    assert!((s.value - 0.601_028_451_57).abs() < 1e-10);
    assert!(q.tail_bound < 1e-30);
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
}

#[test]
fn q_integrand_is_regular_at_origin() {
    for q in [1e-3, 1e-6, 1e-9] {
        assert!((force_q_integrand(q) / q - 1.0).abs() < 2.0 * q);
    }
    assert_eq!(force_q_integrand(0.0), 0.0);
}

#[test]
fn leading_force_reference_values() {
    let t = thermo(5.0);
    let f = leading_force(&t, 10.0);
    // ζ(3) from the independent series.
    let oracle = -2.0 * zeta3_series(1_000_000).value / (8.0 * PI * 1e3);
    assert!(rel(f, oracle) < 1e-12);
    assert!((f + 4.7830e-5).abs() < 5e-9);
    assert_eq!(leading_force(&t, 20.0) / f, 0.125);
    assert!(f < 0.0);
}

#[test]
fn unit_brackets_reproduce_leading_force() {
    let t = thermo(5.0);
    let q = zeta3_quadrature();
    for d in [7.0, 100.0, 1234.5] {
        let f = force_from_brackets(t.beta, d, q.value, -1.0, -1.0);
        assert!(rel(f, leading_force(&t, d)) < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leading_force_depends_only_on_beta_and_d(
        hbar in 0.01f64..100.0, c in 0.1f64..1e3, mass in 0.1f64..1e4, k_cut in 0.1f64..1e3, d in 1.0f64..1e4,
    ) {
        let base = ThermoState::reduced(1.0, 1.0, 5.0).unwrap();
        let other = ThermoState::reduced(1.0, hbar, c).unwrap();
        // Species and form factor never enter.
        let _ = (mass, FormFactor::gaussian(k_cut));
        prop_assert_eq!(leading_force(&base, d).to_bits(), leading_force(&other, d).to_bits());
    }

    #[test]
    fn all_reference_forces_attract(beta in 0.1f64..10.0, d in 0.5f64..1e3) {
        let t = ThermoState::reduced(beta, 1.0, 5.0).unwrap();
        prop_assert!(leading_force(&t, d) < 0.0);
        let set = lifshitz_set(&t, d, RegimeThresholds::default()).unwrap();
        for v in [set.low_t_te1, set.low_t_te0, set.high_t_te1, set.high_t_te0] {
            prop_assert!(v.dominant < 0.0);
            prop_assert!(v.correction >= 0.0);
        }
        prop_assert!(set.low_t_te0.correction > 0.0);
    }
}

#[test]
fn lifshitz_limits() {
    let t = thermo(5.0);
    // α = βħc/d = 0.01: high temperature.
    let d = 500.0;
    let th = RegimeThresholds::default();
    assert_eq!(ForceRegimeParams::new(&t, d, th).unwrap().regime, Regime::HighTemperature);
    let set = lifshitz_set(&t, d, th).unwrap();
    assert_eq!(set.high_t_te1.total() / set.high_t_te0.total(), 2.0);
    assert!(rel(set.high_t_te0.total(), leading_force(&t, d)) < 1e-15);
    assert!(!set.high_t_te0.regime_warning);
    assert!(set.low_t_te1.regime_warning);
    assert_eq!(set.low_t_te1.dominant, set.low_t_te0.dominant);
    assert!(rel(set.low_t_te1.dominant, -PI.powi(4) * 5.0 / (240.0 * PI * PI * d.powi(4))) < 1e-14);
    assert!(rel(set.low_t_te0.correction, ZETA3 / (8.0 * PI * d.powi(3))) < 1e-15);
    let mid = ForceRegimeParams::new(&t, 5.0, th).unwrap();
    assert_eq!(mid.regime, Regime::Crossover);
    assert!(lifshitz_reference(&t, 5.0, ReflectionMode::Te1, Regime::Crossover, th).is_err());
}

#[test]
fn assembled_force_from_computed_brackets() {
    let rows = symmetric_rows();
    let pa = profile(&rows, -6.0, 0.0, 6, 6, false, 1);
    let pb = profile(&rows, 0.0, 6.0, 6, 6, false, 2);
    let seq = KSequence::for_kappa(1.0, 6.0);
    let ursell = leading_ursell(&pa, &pb, seq, Execution::Parallel).unwrap();
    let q = zeta3_quadrature();
    let t = thermo(5.0);
    for d in [100.0, 200.0, 400.0] {
        let f = assemble_force(&ursell, d, &q);
        assert!(rel(f, leading_force(&t, d)) < 0.02, "d={d}: {f} vs {}", leading_force(&t, d));
        let te1 = lifshitz_reference(&t, d, ReflectionMode::Te1, Regime::HighTemperature, RegimeThresholds::default())
            .unwrap()
            .total();
        assert!((f / te1 - 0.5).abs() < 0.01);
    }
}

#[test]
fn coupled_force_converges_at_least_like_inverse_d() {
    let rows = symmetric_rows();
    let pa = profile(&rows, -6.0, 0.0, 6, 6, true, 1);
    let pb = profile(&rows, 0.0, 6.0, 6, 6, true, 2);
    let t = thermo(5.0);
    let ds = [50.0, 100.0, 200.0, 400.0];
    let dev: Vec<f64> = ds
        .iter()
        .map(|&d| rel(f_coupled(&pa, &pb, d, 6, Execution::Parallel).unwrap(), leading_force(&t, d)))
        .collect();
    let fit = fit_power_law(&ds, &dev).unwrap();
    assert!(fit.slope <= -0.95, "slope {}", fit.slope);
    assert!(dev[3] < 0.02, "{dev:?}");
}

#[test]
fn coupled_force_scales_as_inverse_cube() {
    let rows = symmetric_rows();
    let pa = profile(&rows, -6.0, 0.0, 6, 6, true, 1);
    let pb = profile(&rows, 0.0, 6.0, 6, 6, true, 2);
    let ds = [400.0, 800.0, 1600.0];
    let f: Vec<f64> = ds.iter().map(|&d| -f_coupled(&pa, &pb, d, 6, Execution::Sequential).unwrap()).collect();
    let fit = fit_power_law(&ds, &f).unwrap();
    assert!((fit.slope + 3.0).abs() < 0.05, "slope {}", fit.slope);
}

#[test]
fn capacitor_terms() {
    let rows = symmetric_rows();
    let pa = profile(&rows, -6.0, 0.0, 3, 4, true, 1);
    let pb = profile(&rows, 0.0, 6.0, 3, 4, true, 2);
    assert_eq!(capacitor_force(&pa, &pb, true), 0.0);
    let f = capacitor_electrostatic(1.0, -1.0);
    assert_eq!(f, -2.0 * PI);
    assert_eq!(capacitor_electrostatic(2.0, 0.5), 2.0 * PI);

    let t = thermo(5.0);
    let sp = species("ion", 1.0, 100.0, &t);
    let model = MagneticModel::new(&t, FormFactor::from_mass(100.0, 1.0, 5.0));
    let li = sampled_loop(&sp, 1, 8, 5, 0, [0.0; 3]);
    let lj = sampled_loop(&sp, 1, 8, 5, 1, [0.0; 3]);
    let decay = magnetic_capacitor_decay(&li, &lj, &model, 5.0, 50.0, 8).unwrap();
    assert!(-decay.exponent > 4.0, "exponent {}", decay.exponent);
}

#[test]
fn magnetic_remainder_is_higher_order() {
    let t = thermo(5.0);
    let r1 = magnetic_remainder_estimate(&t, 100.0);
    let r2 = magnetic_remainder_estimate(&t, 200.0);
    assert!(rel(r1 / r2, 32.0) < 1e-12);
    assert!(r1 < 0.01 * leading_force(&t, 100.0).abs());
}

#[test]
fn monopole_reduction_on_four_loops() {
    let t = thermo(5.0);
    let ion = species("ion", 1.0, 100.0, &t);
    let anion = species("anion", -1.0, 60.0, &t);
    let a = vec![
        sampled_loop(&ion, 1, 8, 3, 0, [-1.5, 0.2, -0.4]),
        sampled_loop(&anion, 2, 8, 3, 1, [-0.7, -0.3, 0.5]),
    ];
    let b = vec![
        sampled_loop(&ion, 2, 8, 3, 2, [1.1, 0.6, 0.1]),
        sampled_loop(&anion, 1, 8, 3, 3, [2.0, -0.2, -0.8]),
    ];
    let check = monopole_reduction_check(&a, &b).unwrap();
    assert!(check.relative < 1e-4, "{check:?}");
    assert!(check.monopole != 0.0);
    // A single pair without orbit averaging differs: the agreement is not trivial.
    let plain = casimir_core::potentials::vc_force_x(&a[0], &b[0]).unwrap();
    let mono = casimir_core::potentials::monopole_force_x(&a[0], &b[0]);
    assert!(rel(plain, mono) > 1e-3);
}
