use covbound_core::exact::{int, pow, ratio};
use covbound_core::separation::{
    default_delta, lemma54_inequality_holds, lemma54_threshold, separation_count, tail_conditions_hold,
};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Exact decision of `x + 2√x + c < d` by squaring.
fn n2_oracle(eps: &BigRational, c: &BigRational, d: u64) -> bool {
    let d = int(d);
    let x = (BigRational::one() - eps) * &d;
    let rest = &d - &x - c;
    rest > BigRational::zero() && int(4) * &x < &rest * &rest
}

#[test]
fn quadratic_case_matches_squaring_oracle() {
    for (p, q) in [(1, 2), (1, 4), (1, 10), (3, 7), (9, 10)] {
        let eps = ratio(p, q);
        for c in [int(0), int(1), ratio(5, 2)] {
            for d in 1..400u64 {
                assert_eq!(
                    lemma54_inequality_holds(2, &eps, &c, d).unwrap(),
                    n2_oracle(&eps, &c, d),
                    "eps={eps} c={c} d={d}"
                );
            }
        }
    }
}

#[test]
fn thresholds_on_grid() {
    for n in 2..=4u32 {
        for eps in [ratio(1, 2), ratio(1, 4), ratio(1, 10)] {
            for c in [int(0), int(1)] {
                let r = lemma54_threshold(n, &eps, &c).unwrap();
                assert!(r.certified());
                assert!(r.d0_scan <= r.d0_closed.max(r.d_tail), "{r:?}");
                assert!(tail_conditions_hold(n, &eps, &c, r.d_tail));
                assert!(r.d_tail == 1 || !tail_conditions_hold(n, &eps, &c, r.d_tail - 1));
                if r.d0_scan > 1 {
                    assert!(!lemma54_inequality_holds(n, &eps, &c, r.d0_scan - 1).unwrap());
                }
                if n == 2 {
                    assert!((r.d0_scan..=r.scan_top).all(|d| n2_oracle(&eps, &c, d)));
                }
            }
        }
    }
}

#[test]
fn closed_form_alone_is_not_sufficient() {
    // x + 2√x < d fails with equality at d = 48, x = 36, above the closed form 44.
    let (eps, c) = (ratio(1, 4), int(0));
    let r = lemma54_threshold(2, &eps, &c).unwrap();
    assert_eq!(r.d0_closed, 44);
    assert!(!n2_oracle(&eps, &c, 44) && !n2_oracle(&eps, &c, 48));
    assert!(!r.tail_verified);
    assert_eq!(r.d0_scan, 49);
    assert!((49..=r.scan_top).all(|d| n2_oracle(&eps, &c, d)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn feasible_schedules_are_exact(n in 1u32..5, alpha in 1i64..50, q in 2i64..20, d in 1u64..5000) {
        let eps = ratio(1, q);
        let s = separation_count(n, &int(alpha), &eps, d, &default_delta(), &int(1)).unwrap();
        let x = BigRational::from_integer(s.m.clone().into()) / int(alpha);
        prop_assert!(BigRational::from_integer(s.m.clone().into()) <= (BigRational::one() - &eps) * int(alpha) * int(d));
        for (j, a) in (1u32..).zip(&s.a) {
            prop_assert!(pow(a, j) >= pow(&int(j), j) * &x);
        }
        if s.feasible {
            prop_assert!(s.total() < int(d));
        }
    }

    #[test]
    fn feasibility_is_monotone(n in 1u32..4, alpha in 1i64..20, start in 1u64..3000) {
        let eps = ratio(1, 4);
        let mut was = false;
        for d in start..start + 40 {
            let s = separation_count(n, &int(alpha), &eps, d, &default_delta(), &int(0)).unwrap();
            prop_assert!(!was || s.feasible, "feasible at {} but not {}", d - 1, d);
            was = s.feasible;
        }
    }
}
