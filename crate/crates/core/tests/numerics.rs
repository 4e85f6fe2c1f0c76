mod common;

use common::oracle;
use myotrain::classifier::{modify, ProbabilityVector};
use myotrain::signal::{median_frequency, SAMPLE_RATE_HZ};
use proptest::prelude::*;

fn ok(check: common::Check) {
    if let Err(e) = check {
        panic!("{e}");
    }
}

#[test]
fn oracle_agreement() {
    ok(common::check_oracles());
}

#[test]
fn svm_matches_exhaustive_search() {
    ok(common::check_svm());
}

#[test]
fn head_gradient_matches_finite_differences() {
    ok(common::check_gradient());
}

#[test]
fn modification_properties() {
    ok(common::check_modify_properties());
}

#[test]
fn similarity_is_scale_free() {
    ok(common::check_scale_invariance());
}

#[test]
fn sinusoid_median_frequency() {
    // a pure tone on an exact bin concentrates all power there
    let n = 963;
    let f = 40.0 * SAMPLE_RATE_HZ / n as f64;
    let x: Vec<f64> = (0..n)
        .map(|i| (2.0 * std::f64::consts::PI * f * i as f64 / SAMPLE_RATE_HZ).sin())
        .collect();
    let mf = median_frequency(&x, SAMPLE_RATE_HZ).unwrap();
    assert!((mf - f).abs() < SAMPLE_RATE_HZ / n as f64, "{mf} vs {f}");
    assert!((mf - oracle::median_frequency(&x, SAMPLE_RATE_HZ)).abs() < 1e-3);
}

fn simplex() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-6f64..1.0, 9).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    })
}

proptest! {
    #[test]
    fn modify_keeps_the_winner(p in simplex(), m in 0.05f64..1.0) {
        let q = modify(&p, m).unwrap();
        prop_assert_eq!(q.argmax(), ProbabilityVector::new(p.clone()).unwrap().argmax());
        prop_assert!(oracle::entropy(q.as_slice()) >= oracle::entropy(&p) - 1e-12);
        let total: f64 = q.as_slice().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn modify_sharpens_above_one(p in simplex(), m in 1.0f64..4.0) {
        let q = modify(&p, m).unwrap();
        prop_assert!(oracle::entropy(q.as_slice()) <= oracle::entropy(&p) + 1e-12);
    }
}
