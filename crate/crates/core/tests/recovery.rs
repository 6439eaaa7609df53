mod common;

use common::TestRng;
use proptest::prelude::*;
use ridgerec::la::{self, Vector};
use ridgerec::models::{
    make_direction, make_profile, DirectionMode, FunctionOracle, GroundTruth, ModelKind, NoiseSpec,
    NormKind,
};
use ridgerec::recovery::{
    self, algo_a, algo_b, algo_c, algo_d, algo_d_cs, algo_d_noisy, disambiguate_sign,
    estimate_sup_error, CompressedRadial, ProfileTable, RecoveryOptions,
};
use ridgerec::Error;

fn oracle(kind: ModelKind, profile: &str, a: Vector, sigma: f64, seed: u64) -> FunctionOracle {
    let truth = GroundTruth::new(kind, a, make_profile(profile).unwrap()).unwrap();
    FunctionOracle::new(truth, NoiseSpec::gaussian(sigma), seed).unwrap()
}

fn dense(kind: ModelKind, d: usize, seed: u64) -> Vector {
    make_direction(
        d,
        DirectionMode::DenseGaussian,
        NormKind::for_model(kind),
        seed,
    )
    .unwrap()
}

fn sparse(kind: ModelKind, d: usize, s: usize, seed: u64) -> Vector {
    make_direction(d, DirectionMode::Sparse(s), NormKind::for_model(kind), seed).unwrap()
}

fn small_table() -> RecoveryOptions {
    RecoveryOptions {
        table_size: 65,
        ..Default::default()
    }
}

#[test]
fn query_counts() {
    let opts = small_table();
    let t = opts.table_size as u64;
    let k = opts.sign_probes as u64;
    let d = 40;

    let mut o = oracle(
        ModelKind::RidgeCube,
        "tanh",
        dense(ModelKind::RidgeCube, d, 1),
        0.0,
        1,
    );
    let r = algo_a(&mut o, 0.1, &opts).unwrap();
    assert_eq!(r.queries_used, d as u64 + 1 + t);
    assert_eq!(o.queries(), r.queries_used);

    let mut o = oracle(
        ModelKind::RidgeCube,
        "linear",
        sparse(ModelKind::RidgeCube, d, 3, 2),
        0.0,
        2,
    );
    let r = algo_b(&mut o, 20, 0.1, 3, &opts).unwrap();
    assert_eq!(r.queries_used, 20 + 1 + t);

    let mut o = oracle(
        ModelKind::RidgeBall,
        "linear",
        sparse(ModelKind::RidgeBall, d, 3, 3),
        0.0,
        3,
    );
    let r = algo_c(&mut o, 20, 0.1, 4, &opts).unwrap();
    assert_eq!(r.queries_used, 20 + 1 + t);

    let mut o = oracle(
        ModelKind::RadialBall,
        "recip",
        dense(ModelKind::RadialBall, d, 4),
        0.0,
        4,
    );
    let r = algo_d(&mut o, 0.05, 5, &opts).unwrap();
    assert_eq!(r.queries_used, 2 * d as u64 + t + k);

    let mut o = oracle(
        ModelKind::RadialBall,
        "linear",
        sparse(ModelKind::RadialBall, d, 3, 5),
        0.0,
        5,
    );
    let params = CompressedRadial {
        radius: 3f64.sqrt(),
        eta: None,
    };
    let r = algo_d_cs(&mut o, 20, 0.1, params, 6, &opts).unwrap();
    assert_eq!(r.queries_used, 2 * 20 + t + k);
}

#[test]
fn linear_profile_is_recovered_exactly() {
    let opts = small_table();
    for seed in 0..10 {
        let a = dense(ModelKind::RidgeCube, 50, seed);
        let mut o = oracle(ModelKind::RidgeCube, "linear", a.clone(), 0.0, seed);
        let mut r = algo_a(&mut o, 0.3, &opts).unwrap();
        r.score(o.truth());
        assert!(r.direction_error_l1.unwrap() <= 1e-12);
        assert!((la::l1(&r.a_hat) - 1.0).abs() <= 1e-12);

        let a = dense(ModelKind::RadialBall, 50, seed);
        let mut o = oracle(ModelKind::RadialBall, "linear", a, 0.0, seed);
        let mut r = algo_d(&mut o, 0.3, seed, &opts).unwrap();
        r.score(o.truth());
        assert!(r.sign_flipped);
        assert!(
            r.direction_error_l2.unwrap() <= 1e-12,
            "{:?}",
            r.direction_error_l2
        );
        assert!((la::l2(&r.a_hat) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn equal_coordinates_stay_equal() {
    let a = Vector::new(vec![0.5, 0.5]).unwrap();
    let mut o = oracle(ModelKind::RidgeCube, "tanh", a, 0.0, 0);
    let r = algo_a(&mut o, 0.1, &small_table()).unwrap();
    assert_eq!(r.a_hat.as_slice(), &[0.5, 0.5]);
}

#[test]
fn table_spans_profile_domain() {
    let opts = small_table();
    let mut o = oracle(
        ModelKind::RidgeCube,
        "tanh",
        dense(ModelKind::RidgeCube, 5, 0),
        0.0,
        0,
    );
    assert_eq!(
        algo_a(&mut o, 0.1, &opts).unwrap().g_hat.interval(),
        (-1.0, 1.0)
    );
    let mut o = oracle(
        ModelKind::RadialBall,
        "recip",
        dense(ModelKind::RadialBall, 5, 0),
        0.0,
        0,
    );
    assert_eq!(
        algo_d(&mut o, 0.1, 0, &opts).unwrap().g_hat.interval(),
        (0.0, 4.0)
    );
}

#[test]
fn cube_direction_bounds_hold() {
    let opts = small_table();
    let profile = make_profile("tanh").unwrap();
    let c1 = profile.lipschitz().c1;
    let slope = profile.deriv(0.0);
    for &h in &[0.01, 0.1, 0.5] {
        for seed in 0..20 {
            let a = dense(ModelKind::RidgeCube, 30, seed);
            let a_sq = la::l2(&a).powi(2);
            let mut o = oracle(ModelKind::RidgeCube, "tanh", a, 0.0, seed);
            let mut r = algo_a(&mut o, h, &opts).unwrap();
            r.score(o.truth());
            let err = r.direction_error_l1.unwrap();
            assert!(err <= recovery::ridge_direction_bound(h, c1, slope).unwrap());
            assert!(err <= recovery::ridge_direction_bound_sharp(h, c1, slope, a_sq).unwrap());
        }
    }
}

#[test]
fn radial_direction_bound_holds_with_local_constant() {
    let opts = small_table();
    for &h in &[0.02, 0.1] {
        let delta = recovery::radial_local_window(h);
        let profile = make_profile("recip").unwrap();
        let c1 = profile.lipschitz_on(1.0 - delta, 1.0 + delta).c1;
        let bound = recovery::radial_direction_bound(h, c1, profile.deriv(1.0)).unwrap();
        for seed in 0..20 {
            let mut o = oracle(
                ModelKind::RadialBall,
                "recip",
                dense(ModelKind::RadialBall, 30, seed),
                0.0,
                seed,
            );
            let mut r = algo_d(&mut o, h, seed, &opts).unwrap();
            r.score(o.truth());
            assert!(r.direction_error_l2.unwrap() <= bound);
        }
    }
}

#[test]
fn rescaled_representation_gives_identical_estimate() {
    let opts = small_table();
    for seed in 0..5 {
        let a = dense(ModelKind::RidgeCube, 25, seed);
        let mut o1 = oracle(ModelKind::RidgeCube, "tanh-shift", a.clone(), 0.0, seed);
        let scaled = Vector::new(a.iter().map(|v| 2.0 * v).collect()).unwrap();
        let profile = make_profile("tanh-shift").unwrap().rescaled(2.0).unwrap();
        let truth = GroundTruth::new_unchecked(ModelKind::RidgeCube, scaled, profile);
        let mut o2 = FunctionOracle::new(truth, NoiseSpec::default(), seed).unwrap();
        let r1 = algo_a(&mut o1, 0.1, &opts).unwrap();
        let r2 = algo_a(&mut o2, 0.1, &opts).unwrap();
        assert_eq!(r1.a_hat, r2.a_hat);
    }
}

#[test]
fn sup_error_chains() {
    let opts = RecoveryOptions::default();
    for seed in 0..5 {
        let mut o = oracle(
            ModelKind::RidgeCube,
            "tanh-shift",
            dense(ModelKind::RidgeCube, 20, seed),
            0.0,
            seed,
        );
        let mut r = algo_a(&mut o, 0.1, &opts).unwrap();
        r.score(o.truth());
        let sup = estimate_sup_error(o.truth(), &r, 500, seed);
        assert!(sup <= recovery::ridge_sup_bound(1.0, r.direction_error_l1.unwrap()) + 1e-4);

        let mut o = oracle(
            ModelKind::RidgeBall,
            "tanh-shift",
            sparse(ModelKind::RidgeBall, 60, 4, seed),
            0.01,
            seed,
        );
        let mut r = algo_c(&mut o, 40, 0.5, seed, &opts).unwrap();
        r.score(o.truth());
        let sup = estimate_sup_error(o.truth(), &r, 500, seed);
        assert!(sup <= recovery::ridge_sup_bound(1.0, r.direction_error_l2.unwrap()) + 1e-4);

        let mut o = oracle(
            ModelKind::RadialBall,
            "tanh",
            dense(ModelKind::RadialBall, 20, seed),
            0.0,
            seed,
        );
        let mut r = algo_d(&mut o, 0.05, seed, &opts).unwrap();
        r.score(o.truth());
        let sup = estimate_sup_error(o.truth(), &r, 500, seed);
        assert!(sup <= recovery::radial_sup_bound(1.0, r.direction_error_l2.unwrap()) + 1e-4);
    }
}

#[test]
fn sup_error_of_linear_recovery_vanishes() {
    let mut o = oracle(
        ModelKind::RidgeCube,
        "linear",
        dense(ModelKind::RidgeCube, 30, 9),
        0.0,
        9,
    );
    let r = algo_a(&mut o, 0.2, &RecoveryOptions::default()).unwrap();
    assert!(estimate_sup_error(o.truth(), &r, 200, 1) <= 1e-4);
}

#[test]
fn sign_disambiguation() {
    let opts = small_table();
    let a = dense(ModelKind::RadialBall, 20, 3);
    let neg = Vector::new(a.iter().map(|v| -v).collect()).unwrap();
    let mut o = oracle(ModelKind::RadialBall, "linear", a.clone(), 0.0, 0);
    let build = |o: &mut FunctionOracle, c: &Vector| {
        let mut x = vec![0.0; c.len()];
        ProfileTable::build(0.0, 4.0, opts.table_size, |t| {
            for (xi, ci) in x.iter_mut().zip(c.iter()) {
                *xi = (1.0 - t.sqrt()) * ci;
            }
            o.eval(&x)
        })
        .unwrap()
    };
    let table = build(&mut o, &neg);
    let (chosen, _, flipped) = disambiguate_sign(&mut o, neg, table, 10, 1).unwrap();
    assert!(flipped);
    assert!(la::dist_l2(&chosen, &a) <= 1e-15);

    let table = build(&mut o, &a);
    let (chosen, _, flipped) = disambiguate_sign(&mut o, a.clone(), table, 10, 1).unwrap();
    assert!(!flipped);
    assert_eq!(chosen, a);
}

#[test]
fn sign_is_correct_for_recip_profile() {
    let opts = small_table();
    let mut correct = 0;
    for seed in 0..100 {
        let mut o = oracle(
            ModelKind::RadialBall,
            "recip",
            dense(ModelKind::RadialBall, 50, seed),
            0.0,
            seed,
        );
        let mut r = algo_d(&mut o, 0.05, seed, &opts).unwrap();
        r.score(o.truth());
        if r.direction_error_l2.unwrap() < 1.0 {
            correct += 1;
        }
    }
    assert_eq!(correct, 100);
}

#[test]
fn compressed_variants_recover_sparse_linear_directions() {
    let opts = small_table();
    for seed in 0..10 {
        let a = sparse(ModelKind::RidgeCube, 200, 5, seed);
        let mut o = oracle(ModelKind::RidgeCube, "linear", a, 0.0, seed);
        let mut r = algo_b(&mut o, 60, 0.1, seed, &opts).unwrap();
        r.score(o.truth());
        assert!(r.direction_error_l1.unwrap() <= 1e-6);

        let a = sparse(ModelKind::RidgeBall, 200, 5, seed);
        let mut o = oracle(ModelKind::RidgeBall, "linear", a, 0.0, seed);
        let mut r = algo_c(&mut o, 60, 0.1, seed, &opts).unwrap();
        r.score(o.truth());
        assert!(r.unsigned_error_l2.unwrap() <= 1e-6);

        let a = sparse(ModelKind::RadialBall, 200, 5, seed);
        let mut o = oracle(ModelKind::RadialBall, "linear", a, 0.0, seed);
        let mut r = algo_d_noisy(&mut o, 60, 0.1, seed, &opts).unwrap();
        r.score(o.truth());
        assert!(r.direction_error_l2.unwrap() <= 1e-6);
    }
}

#[test]
fn compressed_radial_error_shrinks_with_smaller_step() {
    let opts = small_table();
    let mean = |h: f64| {
        (0..10)
            .map(|seed| {
                let a = sparse(ModelKind::RadialBall, 100, 4, seed);
                let mut o = oracle(ModelKind::RadialBall, "tanh", a, 0.0, seed);
                let params = CompressedRadial {
                    radius: 2.0,
                    eta: None,
                };
                let mut r = algo_d_cs(&mut o, 50, h, params, seed, &opts).unwrap();
                r.score(o.truth());
                r.direction_error_l2.unwrap()
            })
            .sum::<f64>()
            / 10.0
    };
    assert!(mean(0.02) < mean(0.2));
}

#[test]
fn oversized_constraint_radius_is_degenerate() {
    let a = sparse(ModelKind::RadialBall, 50, 3, 1);
    let mut o = oracle(ModelKind::RadialBall, "tanh", a, 0.0, 1);
    let params = CompressedRadial {
        radius: 2.0,
        eta: Some(1e6),
    };
    let err = algo_d_cs(&mut o, 20, 0.1, params, 1, &small_table()).unwrap_err();
    assert!(matches!(err, Error::Degenerate(_)), "{err}");
}

#[test]
fn invalid_inputs_are_rejected() {
    let opts = small_table();
    let a = dense(ModelKind::RidgeCube, 10, 0);
    let mut o = oracle(ModelKind::RidgeCube, "tanh", a.clone(), 0.0, 0);
    assert!(matches!(
        algo_a(&mut o, 1.5, &opts),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        algo_a(&mut o, -1.0, &opts),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        algo_b(&mut o, 11, 0.1, 0, &opts),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        algo_c(&mut o, 5, 0.1, 0, &opts),
        Err(Error::InvalidInput(_))
    ));
    let mut noisy = oracle(ModelKind::RidgeCube, "tanh", a, 0.1, 0);
    assert!(matches!(
        algo_a(&mut noisy, 0.1, &opts),
        Err(Error::InvalidInput(_))
    ));
    assert_eq!(o.queries(), 0);
}

#[test]
fn flat_profile_is_degenerate() {
    let flat = ridgerec::models::Profile::custom(
        "flat",
        |_| 1.0,
        |_| 0.0,
        ridgerec::models::Lipschitz { c0: 0.0, c1: 0.0 },
    );
    let truth = GroundTruth::new(
        ModelKind::RidgeCube,
        dense(ModelKind::RidgeCube, 8, 0),
        flat,
    )
    .unwrap();
    let mut o = FunctionOracle::new(truth, NoiseSpec::default(), 0).unwrap();
    assert!(matches!(
        algo_a(&mut o, 0.1, &small_table()),
        Err(Error::Degenerate(_))
    ));
}

fn normalization_gap(x: &[f64], xt: &[f64], lambda: f64, norm: fn(&[f64]) -> f64) -> (f64, f64) {
    let nx = norm(xt);
    let s = lambda.signum();
    let lhs: Vec<f64> = xt.iter().zip(x).map(|(a, b)| s * a / nx - b).collect();
    let diff: Vec<f64> = xt.iter().zip(x).map(|(a, b)| a - lambda * b).collect();
    (norm(&lhs), 2.0 * norm(&diff) / nx)
}

proptest! {
    #[test]
    fn normalization_is_stable(seed in any::<u64>(), d in 1usize..12, lambda in -5.0f64..5.0) {
        prop_assume!(lambda != 0.0);
        let mut r = TestRng::new(seed);
        for norm in [la::l1 as fn(&[f64]) -> f64, la::l2] {
            let raw = r.vector(d);
            let n = norm(&raw);
            prop_assume!(n > 0.0);
            let x: Vec<f64> = raw.iter().map(|v| v / n).collect();
            let xt: Vec<f64> = r.vector(d).iter().zip(&x).map(|(e, v)| lambda * v + 0.3 * e).collect();
            prop_assume!(norm(&xt) > 0.0);
            let (lhs, rhs) = normalization_gap(&x, &xt, lambda, norm);
            prop_assert!(lhs <= rhs, "{lhs} > {rhs}");
        }
    }
}
