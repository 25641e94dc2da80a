use std::collections::BTreeSet;

use covbound_core::arith::{coin_represent, factorize, is_prime, primes_below, ArithError};
use covbound_core::covdeg::{compute_k, exactness_threshold};
use covbound_core::paulsen::{
    build_coprime_array, build_sn_element, check_coprime_array, is_admissible, ArrayViolation,
};
use num_bigint::BigUint;
use num_integer::Integer;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn brute_coin(g: u64, h: u64, target: u64) -> Option<(u64, u64)> {
    (0..=target / h)
        .find(|y| (target - h * y).is_multiple_of(g))
        .map(|y| ((target - h * y) / g, y))
}

#[test]
fn coin_matches_brute_force() {
    for g in 1..=30u64 {
        for h in 1..=30u64 {
            if g.gcd(&h) != 1 {
                continue;
            }
            for target in 1..=g * h + 30 {
                let expected = brute_coin(g, h, target);
                match coin_represent(&big(g), &big(h), &big(target)) {
                    Ok(rep) => {
                        assert!(rep.holds());
                        assert_eq!(Some((rep.x.try_into().unwrap(), rep.y.try_into().unwrap())), expected);
                    }
                    Err(ArithError::NotRepresentable { .. }) => assert_eq!(expected, None, "{g} {h} {target}"),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}

#[test]
fn small_primes_are_not_admissible() {
    for p in primes_below(20_000) {
        for n in 3..=5 {
            assert!(!is_admissible(n, &big(p as u64)).unwrap().admissible, "{n} {p}");
        }
    }
}

#[test]
fn sn_elements_are_admissible_prime_products() {
    let e = build_sn_element(4, &big(1), &BTreeSet::new()).unwrap();
    assert!(is_admissible(4, &e.value).unwrap().admissible);
    assert!(e.factorization.primes().all(|p| p > &big(16) && is_prime(p)));
    let again = factorize(&e.value).unwrap();
    assert_eq!(again.reassemble(), e.value);
}

#[test]
fn arrays_above_threshold_check_out() {
    let t = exactness_threshold(3, 2).unwrap();
    assert_eq!(t.k, compute_k(3, 2));
    let n_thr = u128::try_from(&t.threshold).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let d: Vec<BigUint> = (0..2)
            .map(|_| BigUint::from(n_thr + rng.random_range(0..n_thr)))
            .collect();
        let cert = build_coprime_array(3, &big(t.k), &d).unwrap();
        check_coprime_array(&cert).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back = serde_json::from_str(&json).unwrap();
        assert_eq!(cert, back);
    }
}

#[test]
fn checker_rejects_shared_primes_across_columns() {
    let t = exactness_threshold(3, 2).unwrap();
    let d = vec![t.threshold.clone(), t.threshold.clone() + 1u32];
    let mut cert = build_coprime_array(3, &big(t.k), &d).unwrap();
    // make column 1 reuse column 0's generator
    cert.columns[1] = cert.columns[0].clone();
    cert.degrees[1] = cert.degrees[0].clone();
    assert!(matches!(
        check_coprime_array(&cert),
        Err(ArrayViolation::NotCoprime { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factorization_reassembles(m in 1u64..u64::MAX) {
        let f = factorize(&big(m)).unwrap();
        prop_assert_eq!(f.reassemble(), big(m));
        prop_assert!(f.primes().all(is_prime));
    }

    #[test]
    fn coin_above_threshold_always_works(g in 2u64..500, h in 2u64..500, extra in 0u64..10_000) {
        prop_assume!(g.gcd(&h) == 1);
        let target = (g - 1) * (h - 1) + extra;
        let rep = coin_represent(&big(g), &big(h), &big(target)).unwrap();
        prop_assert!(rep.holds());
        prop_assert!(rep.y < big(g));
    }
}
