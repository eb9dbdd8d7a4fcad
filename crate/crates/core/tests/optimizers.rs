use std::cell::Cell;

use proptest::prelude::*;
use shakebal::optimizers::{
    inertia_weight, optimize, selection_probabilities, AbcParams, Algorithm, BgaParams, Bounds, HgapsoParams,
    OptimizerParams, PsoParams,
};

fn params(alg: Algorithm, iterations: usize) -> OptimizerParams {
    let p = match alg {
        Algorithm::Pso => OptimizerParams::Pso(PsoParams {
            population: 12,
            ..PsoParams::default()
        }),
        Algorithm::Abc => OptimizerParams::Abc(AbcParams {
            food_sources: 6,
            limit: 5,
            ..AbcParams::default()
        }),
        Algorithm::Bga => OptimizerParams::Bga(BgaParams {
            population: 12,
            ..BgaParams::default()
        }),
        Algorithm::Hgapso => OptimizerParams::Hgapso(HgapsoParams {
            population: 12,
            ..HgapsoParams::default()
        }),
    };
    p.with_iterations(iterations)
}

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (std::f64::consts::TAU * v).cos())
            .sum::<f64>()
}

fn skewed_box() -> Bounds {
    Bounds::new(vec![-3.0, 0.5, -10.0], vec![-1.0, 4.0, 2.0]).unwrap()
}

#[test]
fn same_seed_same_run() {
    for alg in Algorithm::ALL {
        let p = params(alg, 40);
        let a = optimize(rastrigin, &skewed_box(), &p, 7).unwrap();
        let b = optimize(rastrigin, &skewed_box(), &p, 7).unwrap();
        assert_eq!(a.best_x, b.best_x, "{alg}");
        assert_eq!(a.trace, b.trace, "{alg}");
        assert_eq!(a.evaluations, b.evaluations, "{alg}");
        let c = optimize(rastrigin, &skewed_box(), &p, 8).unwrap();
        assert_ne!(a.trace, c.trace, "{alg}: seeds 7 and 8 gave identical traces");
    }
}

#[test]
fn traces_are_monotone_and_best_is_inside_the_box() {
    for alg in Algorithm::ALL {
        for seed in 1..=5 {
            let r = optimize(rastrigin, &skewed_box(), &params(alg, 60), seed).unwrap();
            assert_eq!(r.trace.len(), 61, "{alg}");
            assert_eq!(r.checkpoints.len(), 60, "{alg}");
            assert!(r.trace.windows(2).all(|w| w[1] <= w[0]), "{alg}: {:?}", r.trace);
            assert!(r.checkpoints.windows(2).all(|w| w[1] >= w[0]));
            assert_eq!(*r.trace.last().unwrap(), r.best_f);
            assert!(skewed_box().contains(&r.best_x), "{alg}: {:?}", r.best_x);
            assert_eq!(rastrigin(&r.best_x), r.best_f);
        }
    }
}

#[test]
fn evaluation_budgets() {
    let it = 25;
    for alg in Algorithm::ALL {
        let calls = Cell::new(0usize);
        let f = |x: &[f64]| {
            calls.set(calls.get() + 1);
            rastrigin(x)
        };
        let r = optimize(f, &skewed_box(), &params(alg, it), 3).unwrap();
        assert_eq!(calls.get(), r.evaluations, "{alg}");
        match alg {
            Algorithm::Pso | Algorithm::Hgapso => assert_eq!(r.evaluations, 12 * (it + 1), "{alg}"),
            Algorithm::Bga => assert_eq!(r.evaluations, 12 + it * (12 - 1)),
            Algorithm::Abc => {
                // scouts add one evaluation each
                let base = 6 + 2 * 6 * it;
                assert!(
                    r.evaluations >= base && r.evaluations <= base + 6 * it,
                    "{}",
                    r.evaluations
                );
            }
        }
    }
}

#[test]
fn non_finite_objective_is_an_error() {
    for alg in Algorithm::ALL {
        let f = |x: &[f64]| if x[0] > -2.0 { f64::NAN } else { 1.0 };
        assert!(optimize(f, &skewed_box(), &params(alg, 50), 1).is_err(), "{alg}");
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let b = skewed_box();
    let f = |x: &[f64]| x[0];
    assert!(optimize(
        f,
        &b,
        &OptimizerParams::Pso(PsoParams {
            population: 0,
            ..PsoParams::default()
        }),
        1
    )
    .is_err());
    assert!(optimize(
        f,
        &b,
        &OptimizerParams::Abc(AbcParams {
            food_sources: 1,
            ..AbcParams::default()
        }),
        1
    )
    .is_err());
    assert!(optimize(
        f,
        &b,
        &OptimizerParams::Bga(BgaParams {
            bits_per_variable: 0,
            ..BgaParams::default()
        }),
        1
    )
    .is_err());
    assert!(optimize(
        f,
        &b,
        &OptimizerParams::Hgapso(HgapsoParams {
            breeding_ratio: 1.5,
            ..HgapsoParams::default()
        }),
        1
    )
    .is_err());
}

#[test]
fn inertia_endpoints() {
    assert_eq!(inertia_weight(0.9, 0.4, 300, 0), 0.9);
    assert_eq!(inertia_weight(0.9, 0.4, 300, 300), 0.4);
    assert!((inertia_weight(0.9, 0.4, 100, 50) - 0.65).abs() < 1e-15);
}

proptest! {
    #[test]
    fn roulette_probabilities_sum_to_one(costs in prop::collection::vec(-1e6..1e9f64, 2..200)) {
        let p = selection_probabilities(&costs);
        prop_assert_eq!(p.len(), costs.len());
        prop_assert!(p.iter().all(|&v| v > 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn lower_cost_gets_higher_probability(a in 0.0..1e6f64, b in 0.0..1e6f64) {
        let p = selection_probabilities(&[a, b]);
        if a < b {
            prop_assert!(p[0] >= p[1]);
        }
    }
}
