mod common;

use std::f64::consts::TAU;

use proptest::prelude::*;
use shakebal::mechanism::sample_at;
use shakebal::objective::{evaluate, polar_area, same_plane_cancellation};
use shakebal::{DecisionVector, MechanismConfig, ObjectiveSpec};

fn config() -> impl Strategy<Value = MechanismConfig> {
    any::<u64>().prop_map(|seed| common::random_config(&mut common::rng(seed)))
}

fn decision() -> impl Strategy<Value = DecisionVector> {
    (0.0..5.0f64, 0.0..5.0f64, 0.0..TAU, 0.0..TAU)
        .prop_map(|(m1, m2, p1, p2)| DecisionVector::new(m1, m2, p1, p2).unwrap())
}

fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(1e-300)
}

fn samples(cfg: &MechanismConfig, dv: &DecisionVector, theta: f64) -> [f64; 4] {
    let s = sample_at(cfg, dv, theta);
    [s.p1, s.p2, s.p3, s.p4]
}

fn scale_of(values: &[[f64; 4]]) -> f64 {
    values.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn periodic_in_theta(cfg in config(), dv in decision(), theta in -10.0..10.0f64) {
        let a = samples(&cfg, &dv, theta);
        let b = samples(&cfg, &dv, theta + TAU);
        let s = scale_of(&[a, b]);
        for i in 0..4 {
            prop_assert!(close(a[i], b[i], s, 1e-12));
        }
    }

    #[test]
    fn linear_in_each_mass(cfg in config(), dv in decision(), theta in 0.0..TAU, which in 0usize..5) {
        let with = |m: f64| -> [f64; 4] {
            let mut c = cfg;
            let mut d = dv;
            match which {
                0 => c.crank_mass = m,
                1 => c.slider_mass = m,
                2 => c.unbalance_mass = m,
                3 => d = DecisionVector::new(m, dv.m2(), dv.phi1(), dv.phi2()).unwrap(),
                _ => d = DecisionVector::new(dv.m1(), m, dv.phi1(), dv.phi2()).unwrap(),
            }
            samples(&c, &d, theta)
        };
        let (zero, one, two) = (with(0.0), with(0.7), with(1.4));
        let s = scale_of(&[zero, one, two]);
        for i in 0..4 {
            // doubling the mass doubles its contribution
            prop_assert!(close(two[i] - zero[i], 2.0 * (one[i] - zero[i]), s, 1e-12));
        }
    }

    #[test]
    fn forces_scale_with_omega_squared(cfg in config(), dv in decision(), theta in 0.0..TAU, k in 0.1..10.0f64) {
        let fast = MechanismConfig { omega: cfg.omega * k, ..cfg };
        let a = samples(&cfg, &dv, theta);
        let b = samples(&fast, &dv, theta);
        let s = scale_of(&[b]);
        for i in 0..4 {
            prop_assert!(close(b[i], k * k * a[i], s, 1e-12));
        }
    }

    #[test]
    fn costs_scale_with_omega_fourth(cfg in config(), dv in decision(), k in 0.1..10.0f64) {
        let fast = MechanismConfig { omega: cfg.omega * k, ..cfg };
        let a = evaluate(&cfg, &dv, &ObjectiveSpec::for_mechanism(&cfg)).unwrap();
        let b = evaluate(&fast, &dv, &ObjectiveSpec::for_mechanism(&fast)).unwrap();
        let k4 = k.powi(4);
        prop_assert!(close(b.raw_cost, k4 * a.raw_cost, b.raw_cost, 1e-10));
        prop_assert!(close(b.c1, k4 * a.c1, b.c1, 1e-10));
        prop_assert!(close(b.c2, k4 * a.c2, b.c2, 1e-10));
    }

    #[test]
    fn cost_is_periodic_in_counterweight_angles(cfg in config(), dv in decision(), turns in -3i32..4) {
        let spec = ObjectiveSpec::for_mechanism(&cfg);
        let shift = TAU * f64::from(turns);
        let moved = DecisionVector::new(dv.m1(), dv.m2(), dv.phi1() + shift, dv.phi2() - shift).unwrap();
        let a = evaluate(&cfg, &dv, &spec).unwrap();
        let b = evaluate(&cfg, &moved, &spec).unwrap();
        prop_assert!(close(a.raw_cost, b.raw_cost, a.raw_cost, 1e-10));
        prop_assert!(close(a.c1, b.c1, a.c1, 1e-10));
        prop_assert!(close(a.c2, b.c2, a.c2, 1e-10));
    }

    #[test]
    fn rotating_all_masses_shifts_the_profile(cfg in config(), dv in decision(), theta in 0.0..TAU, delta in 0.0..TAU) {
        // only holds without crank and slider masses, whose terms stay locked to θ
        let cfg = MechanismConfig { crank_mass: 0.0, slider_mass: 0.0, ..cfg };
        let rotated_cfg = MechanismConfig { unbalance_angle: cfg.unbalance_angle + delta, ..cfg };
        let rotated = DecisionVector::new(dv.m1(), dv.m2(), dv.phi1() + delta, dv.phi2() + delta).unwrap();
        let a = samples(&rotated_cfg, &rotated, theta);
        let b = samples(&cfg, &dv, theta + delta);
        let s = scale_of(&[a, b]);
        for i in 0..4 {
            prop_assert!(close(a[i], b[i], s, 1e-12));
        }
        let spec = ObjectiveSpec::for_mechanism(&cfg);
        let ca = evaluate(&rotated_cfg, &rotated, &spec).unwrap();
        let cb = evaluate(&cfg, &dv, &spec).unwrap();
        prop_assert!(close(ca.raw_cost, cb.raw_cost, cb.raw_cost, 1e-10));
    }

    #[test]
    fn penalty_is_nonnegative_and_exact_when_feasible(cfg in config(), dv in decision(), frac in 0.1..2.0f64) {
        let base = evaluate(&cfg, &dv, &ObjectiveSpec::for_mechanism(&cfg)).unwrap();
        prop_assume!(base.c1 > 0.0 && base.c2 > 0.0);
        let spec = ObjectiveSpec { c1_max: frac * base.c1, c2_max: frac * base.c2, ..ObjectiveSpec::for_mechanism(&cfg) };
        let b = evaluate(&cfg, &dv, &spec).unwrap();
        prop_assert!(b.raw_cost >= 0.0 && b.c1 >= 0.0 && b.c2 >= 0.0);
        prop_assert!(b.total >= b.raw_cost);
        if frac >= 1.0 {
            prop_assert!(b.is_feasible());
            prop_assert_eq!(b.total, b.raw_cost);
        } else {
            prop_assert!(!b.is_feasible());
        }
    }

    #[test]
    fn constant_radius_area(r in 0.0..100.0f64, n in 8usize..2000) {
        let area = polar_area(&vec![r; n]).unwrap();
        prop_assert!(close(area, std::f64::consts::PI * r * r, area, 1e-12));
    }
}

#[test]
fn same_plane_counterweight_cancels_everything() {
    let cfg = common::cancellation_config();
    let spec = ObjectiveSpec {
        n_samples: 1024,
        ..ObjectiveSpec::for_mechanism(&cfg)
    };
    let b = evaluate(&cfg, &same_plane_cancellation(&cfg), &spec).unwrap();
    assert!(b.raw_cost <= 1e-9 && b.c1 <= 1e-9 && b.c2 <= 1e-9, "{b:?}");
}

#[test]
fn calibration_maxima_concentrate() {
    use shakebal::objective::{calibrate_bounds, default_bounds};
    let cfg = MechanismConfig::default();
    let bounds = default_bounds(&cfg);
    let (a1, a2) = calibrate_bounds(&cfg, &bounds, 720, 10_000, 0.5, 1).unwrap();
    let (b1, b2) = calibrate_bounds(&cfg, &bounds, 720, 10_000, 0.5, 2).unwrap();
    assert!((a1 - b1).abs() <= 0.1 * a1.max(b1), "{a1} vs {b1}");
    assert!((a2 - b2).abs() <= 0.1 * a2.max(b2), "{a2} vs {b2}");
}

#[test]
fn single_calibration_sample_is_exact() {
    use rand::SeedableRng;
    use shakebal::objective::{calibrate_bounds, default_bounds};
    let cfg = MechanismConfig::default();
    let bounds = default_bounds(&cfg);
    let (c1, c2) = calibrate_bounds(&cfg, &bounds, 720, 1, 1.0, 5).unwrap();
    let point = bounds.sample(&mut rand_chacha::ChaCha8Rng::seed_from_u64(5));
    let b = evaluate(
        &cfg,
        &DecisionVector::from_point(&point).unwrap(),
        &ObjectiveSpec::for_mechanism(&cfg),
    )
    .unwrap();
    assert_eq!((c1, c2), (b.c1, b.c2));
}
