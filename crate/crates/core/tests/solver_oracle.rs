use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use ssls::model::{CoefficientVector, Dataset, PenaltySpec};
use ssls::solvers::{
    augment_design, brute_force_fit, fit_adaptive_elastic_net, kkt_check, lars_path, penalized_path,
    rescale_columns, LarsOptions, Moments,
};

fn random_instance(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Dataset {
    let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let beta = DVector::from_fn(p, |_, _| rng.random_range(-3.0..3.0));
    let noise = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let y = &x * beta + noise;
    Dataset::new(x, y).unwrap()
}

#[test]
fn lars_agrees_with_sign_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..100 {
        let p = rng.random_range(2..=6);
        let n = rng.random_range(8..=30);
        let ds = random_instance(&mut rng, n, p);
        let weights: Vec<f64> = (0..p).map(|_| rng.random_range(0.2..3.0)).collect();
        let cmax = ds
            .x()
            .tr_mul(ds.y())
            .iter()
            .zip(&weights)
            .map(|(c, w)| c.abs() / w)
            .fold(0.0, f64::max);
        let lambda1 = rng.random_range(0.0..cmax);
        let lambda2 = [0.0, 0.01, 1.0, 100.0][trial % 4];
        let spec = PenaltySpec::new(lambda1, lambda2, 1.0, weights).unwrap();
        let fast = fit_adaptive_elastic_net(&ds, &spec).unwrap();
        let slow = brute_force_fit(&ds, &spec).unwrap();
        let diff = fast.beta.max_abs_diff(&slow.beta);
        assert!(diff <= 1e-6, "trial {trial}: coefficient gap {diff}");
        assert!(
            (fast.objective - slow.objective).abs() <= 1e-9,
            "trial {trial}: objective gap {}",
            fast.objective - slow.objective
        );
        assert_eq!(fast.support, slow.support, "trial {trial}");
    }
}

#[test]
fn breakpoints_satisfy_kkt_and_support_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let n = rng.random_range(10..40);
        let p = rng.random_range(2..60);
        let ds = random_instance(&mut rng, n, p);
        let path = lars_path(&ds, &vec![1.0; p], 10_000).unwrap();
        assert!(!path.truncated);
        assert!(path.breakpoints[0].support.is_empty());
        for pair in path.breakpoints.windows(2) {
            assert!(pair[1].lambda1 < pair[0].lambda1);
        }
        for bp in &path.breakpoints {
            assert!(bp.support.len() <= n.min(p));
            let spec = PenaltySpec::unweighted(bp.lambda1, 0.0, p).unwrap();
            let v = kkt_check(&ds, &spec, &bp.beta);
            assert!(v <= 1e-8, "n={n} p={p} lambda={} size={} kkt={v} last={}", bp.lambda1, bp.support.len(), path.last().lambda1);
        }
        assert!(path.last().lambda1 == 0.0);
    }
}

#[test]
fn rescaled_route_matches_weighted_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..25 {
        let ds = random_instance(&mut rng, 10, 6);
        let init = CoefficientVector::from_vec((0..6).map(|_| rng.random_range(-2.0..2.0)).collect());
        let gamma = rng.random_range(0.5..2.0);
        let lambda2 = rng.random_range(0.0..5.0);
        let spec = PenaltySpec::adaptive(0.0, lambda2, gamma, &init).unwrap();
        let lambda1 = 0.3
            * ds.x()
                .tr_mul(ds.y())
                .iter()
                .zip(&spec.weights)
                .map(|(c, w)| c.abs() / w)
                .fold(0.0, f64::max);
        let spec = spec.with_lambda1(lambda1);

        // route 1: explicit augmented and rescaled design, plain lasso
        let aug = augment_design(&ds, lambda2);
        let (scaled, record) = rescale_columns(&aug, &init, gamma);
        let plain = Dataset::new(scaled.x_tilde.clone(), scaled.y_tilde.clone()).unwrap();
        let path = lars_path(&plain, &vec![1.0; plain.p()], 10_000).unwrap();
        let theta = path.solution_at(lambda1).unwrap();
        let via_rescale = record.to_original(theta.as_slice());

        // route 2: weighted problem from the original data's cross products
        let direct = fit_adaptive_elastic_net(&ds, &spec).unwrap();
        assert!(via_rescale.max_abs_diff(&direct.beta) <= 1e-8);
        assert_eq!(theta.support().len(), direct.support.len());
    }
}

#[test]
fn larger_instances_meet_kkt_tolerance() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..40 {
        let n = rng.random_range(10..=100);
        let p = rng.random_range(2..=200);
        let ds = random_instance(&mut rng, n, p);
        let lambda2 = [0.0, 0.01, 1.0, 100.0][trial % 4];
        let lambda1 = rng.random_range(0.0..1.0) * ds.x().tr_mul(ds.y()).amax();
        let spec = PenaltySpec::unweighted(lambda1, lambda2, p).unwrap();
        let fit = fit_adaptive_elastic_net(&ds, &spec).unwrap();
        assert!(
            fit.kkt_max_violation <= 1e-8,
            "trial {trial} n={n} p={p} l2={lambda2}: {}",
            fit.kkt_max_violation
        );
        let limit = if lambda2 == 0.0 { n.min(p) } else { p };
        assert!(fit.support.len() <= limit);
    }
}

#[test]
fn augmented_path_respects_support_limits() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ds = random_instance(&mut rng, 12, 30);
    let moments = Moments::new(&ds);
    let path = penalized_path(&moments, 0.5, &vec![1.0; 30], &LarsOptions::full(30, 12)).unwrap();
    assert!(path.max_support_size() <= 30);
    assert!(path.max_support_size() > 12, "ridge term lifts the n-variable cap");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn positive_column_scaling_preserves_support(seed in 0u64..10_000, col in 0usize..5, factor in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ds = random_instance(&mut rng, 20, 5);
        let lambda1 = 0.2 * ds.x().tr_mul(ds.y()).amax();
        let spec = PenaltySpec::unweighted(lambda1, 0.0, 5).unwrap();
        let base = fit_adaptive_elastic_net(&ds, &spec).unwrap();

        let mut x = ds.x().clone();
        x.column_mut(col).scale_mut(factor);
        let scaled_ds = Dataset::new(x, ds.y().clone()).unwrap();
        // compensating weight keeps the problem equivalent after rescaling
        let mut weights = vec![1.0; 5];
        weights[col] = factor;
        let scaled_spec = PenaltySpec::new(lambda1, 0.0, 0.0, weights).unwrap();
        let scaled = fit_adaptive_elastic_net(&scaled_ds, &scaled_spec).unwrap();
        prop_assert_eq!(&base.support, &scaled.support);
        prop_assert!((scaled.beta.get(col) * factor - base.beta.get(col)).abs() <= 1e-8);
    }
}
