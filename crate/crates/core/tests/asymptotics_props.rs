mod common;

use common::*;
use duhamel::asymptotics::{convergence_gap, fixed_point_check, translation_sweep, verify_bound, BOUND_SLACK};
use duhamel::TestFunctional;
use proptest::prelude::*;

fn grid(n: usize, to: f64) -> Vec<f64> {
    (0..n).map(|k| to * k as f64 / (n - 1) as f64).collect()
}

fn functional() -> impl Strategy<Value = TestFunctional> {
    prop_oneof![
        (-3.0..3.0f64, 0.3..3.0f64).prop_map(|(c, w)| TestFunctional::gaussian_hat(vec![c], w).unwrap()),
        (-4.0..4.0f64).prop_map(|x| TestFunctional::point_evaluation(vec![x]).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gap_respects_both_rates(p in steady_problem(), f in functional()) {
        let r = verify_bound(&p, &f, &grid(50, 10.0)).unwrap();
        prop_assert_eq!(r.bound_violations, 0);
        prop_assert!(r.kappa_effective >= r.kappa_declared);
        for (t, gap) in r.times.iter().zip(&r.gaps) {
            prop_assert!(*gap >= 0.0);
            prop_assert!(*gap <= r.c_phi * (-r.kappa_declared * t).exp() * (1.0 + BOUND_SLACK));
        }
    }

    #[test]
    fn threshold_time_is_sufficient(p in steady_problem(), f in functional(), digits in 1.0..8.0f64) {
        let times = grid(50, 10.0);
        let r = verify_bound(&p, &f, &times).unwrap();
        prop_assume!(r.c_phi > 0.0);
        let eps = r.c_phi * 10f64.powf(-digits);
        let t_eps = r.t_epsilon(eps).unwrap();
        for (t, gap) in r.times.iter().zip(&r.gaps) {
            if *t >= t_eps {
                prop_assert!(*gap < eps, "t={} gap={} eps={}", t, gap, eps);
            }
        }
    }

    #[test]
    fn translates_share_the_bound(
        p in steady_problem(),
        f in functional(),
        shifts in prop::collection::vec(-5.0..5.0f64, 0..5),
        t in 0.0..10.0f64,
    ) {
        let shifts: Vec<Vec<f64>> = shifts.into_iter().map(|h| vec![h]).collect();
        let r = verify_bound(&p, &f, &[t]).unwrap();
        let worst = translation_sweep(&p, &f, &shifts, t).unwrap();
        prop_assert!(worst <= r.bounds[0] * (1.0 + BOUND_SLACK));
        if shifts.is_empty() {
            prop_assert_eq!(worst, 0.0);
        } else {
            prop_assert!(worst >= 0.0);
        }
        let plain = convergence_gap(&p, &f, t).unwrap();
        prop_assert!((plain - r.gaps[0]).abs() <= 1e-15 * (1.0 + plain));
    }

    #[test]
    fn steady_solution_is_a_fixed_point(p in steady_problem()) {
        let r = fixed_point_check(&p, &grid(26, 5.0)).unwrap();
        prop_assert!(r.max_tv_discrepancy <= 1e-10, "{}", r.max_tv_discrepancy);
    }
}
