mod common;

use common::*;
use duhamel::measure::convexity_sides;
use duhamel::{SpaceTimeMeasure, TestFunctional};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn functional() -> impl Strategy<Value = TestFunctional> {
    prop_oneof![
        (-3.0..3.0f64, 0.2..3.0f64).prop_map(|(c, w)| TestFunctional::gaussian_hat(vec![c], w).unwrap()),
        (-5.0..5.0f64).prop_map(|x| TestFunctional::point_evaluation(vec![x]).unwrap()),
    ]
}

proptest! {
    #[test]
    fn pairing_is_linear(m1 in spatial(5), m2 in spatial(5), a in complex(), f in functional()) {
        let lhs = m1.scale(a).add(&m2).unwrap().pair(&f).unwrap();
        let rhs = a * m1.pair(&f).unwrap() + m2.pair(&f).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + rhs.norm()));
    }

    #[test]
    fn pairing_is_conjugate_consistent(m in spatial(5), f in functional()) {
        let lhs = m.conj_reflect().pair(&f).unwrap();
        let rhs = m.pair(&f.conj_reflected()).unwrap().conj();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + rhs.norm()));
    }

    #[test]
    fn total_variation_is_a_norm(m1 in spatial(5), m2 in spatial(5), a in complex()) {
        let scaled = m1.scale(a).total_variation();
        prop_assert!((scaled - a.norm() * m1.total_variation()).abs() <= 1e-13 * (1.0 + scaled));
        let sum = m1.add(&m2).unwrap().total_variation();
        prop_assert!(sum <= (m1.total_variation() + m2.total_variation()) * (1.0 + 1e-14));
    }

    #[test]
    fn weighted_mass_decreases(y in source(-5.0, 5.0), ns in 0u32..4, nt in 0u32..4) {
        let base = y.weighted_mass(ns, nt).unwrap();
        prop_assert!(y.weighted_mass(ns + 1, nt).unwrap() <= base * (1.0 + 1e-12));
        prop_assert!(y.weighted_mass(ns, nt + 1).unwrap() <= base * (1.0 + 1e-12));
    }

    #[test]
    fn nonneg_restriction_is_idempotent(y in source(-5.0, 5.0)) {
        let once = y.restrict_nonneg_time();
        let twice = once.restrict_nonneg_time();
        prop_assert_eq!(&once, &twice);
        prop_assert!(once.total_variation() <= y.total_variation() * (1.0 + 1e-14));
        prop_assert!(once.is_supported_nonneg());
    }

    #[test]
    fn primitive_increment_rule(p in profile(-5.0, 5.0, 5, 3), s in -6.0..6.0f64, dt in 0.0..6.0f64) {
        let t = s + dt;
        let lhs = p.primitive(t) - p.primitive(s);
        let rhs = p.mass_between(s, t);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + p.total_variation()));
    }

    #[test]
    fn primitive_is_zero_at_origin(p in profile(-5.0, 5.0, 5, 3)) {
        prop_assert_eq!(p.primitive(0.0), c(0.0, 0.0));
    }
}

#[test]
fn convexity_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut violations = 0;
    for _ in 0..10_000 {
        let d = rng.gen_range(1..=4);
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let m = rng.gen_range(0..=8);
        let (lhs, rhs) = convexity_sides(&x, &y, m);
        if lhs > rhs * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn empty_source_restricts_to_empty() {
    let z = SpaceTimeMeasure::zero(1);
    assert_eq!(z.restrict_nonneg_time().total_variation(), 0.0);
}
