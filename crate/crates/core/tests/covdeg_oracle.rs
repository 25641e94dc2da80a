use std::collections::HashMap;

mod support;

use covbound_core::covdeg::{
    best_certified_bound, explicit_lower_bound, verify_certificate, CovdegError, Engine,
    MultiDegreeProblem, Rule, RuleConfig, DEFAULT_BUDGET,
};
use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;

fn prob(n: u32, d: &[u64]) -> MultiDegreeProblem {
    MultiDegreeProblem::new(n, d.to_vec()).unwrap()
}

#[test]
fn engine_matches_oracle() {
    let mut memo = HashMap::new();
    let mut engine = Engine::new(RuleConfig::default());
    for n in 1..=4u32 {
        for d1 in 1..=7u64 {
            for d2 in 0..=d1.min(5) {
                let degrees: Vec<u64> = if d2 == 0 { vec![d1] } else { vec![d1, d2] };
                let p = prob(n, &degrees);
                let cert = engine.certify(&p, DEFAULT_BUDGET).unwrap();
                let expected = support::covdeg_oracle(n, degrees.clone(), &mut memo);
                assert_eq!(cert.value(), &BigUint::from(expected), "{p}");
            }
        }
    }
    for d in [[3u64, 2, 2], [4, 3, 2], [3, 3, 3]] {
        let p = prob(3, &d);
        let cert = engine.certify(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!(cert.value(), &BigUint::from(support::covdeg_oracle(3, d.to_vec(), &mut memo)));
    }
}

#[test]
fn hand_dp_pins() {
    // B(2,1,(2)) = 1, B(2,1,(3)) = 2, B(2,1,(4)) = 3 via Split(3,1)
    let two = best_certified_bound(&prob(2, &[2]), 100).unwrap();
    assert_eq!(two.value(), &BigUint::one());
    // DropDim ties with ProductFloor at 1; the shallower derivation wins
    assert_eq!(two.rule(), Rule::ProductFloor);
    let three = best_certified_bound(&prob(2, &[3]), 100).unwrap();
    assert_eq!(three.value(), &BigUint::from(2u32));
    let four = best_certified_bound(&prob(2, &[4]), 100).unwrap();
    assert_eq!(four.value(), &BigUint::from(3u32));
    assert_eq!(four.rule(), Rule::Split { a: 3, b: 1 });
}

#[test]
fn tampered_certificates_are_rejected() {
    let config = RuleConfig::default();
    let cert = best_certified_bound(&prob(2, &[4]), DEFAULT_BUDGET).unwrap();
    verify_certificate(&cert, &config).unwrap();

    let leaf = cert.nodes.iter().position(|n| n.children.is_empty()).unwrap();
    let mut bad = cert.clone();
    bad.nodes[leaf].value += 1u32;
    let failure = verify_certificate(&bad, &config).unwrap_err();
    assert_eq!(failure.node, leaf);
    assert_eq!(failure.path.first(), Some(&bad.root));
    assert_eq!(failure.path.last(), Some(&leaf));

    let mut inflated = cert.clone();
    let root = inflated.root;
    inflated.nodes[root].value = BigUint::from(5u32);
    let failure = verify_certificate(&inflated, &config).unwrap_err();
    assert!(failure.reason.contains("exceeds the degree product"), "{failure}");

    let mut wrong_rule = cert.clone();
    wrong_rule.nodes[root].rule = Rule::Split { a: 2, b: 2 };
    assert!(verify_certificate(&wrong_rule, &config).is_err());

    let mut wrong_child = cert.clone();
    wrong_child.nodes[root].children.swap(0, 1);
    assert!(verify_certificate(&wrong_child, &config).is_err());
}

#[test]
fn certificate_json_round_trip() {
    let cert = best_certified_bound(&prob(3, &[6, 5]), DEFAULT_BUDGET).unwrap();
    let json = serde_json::to_string(&cert).unwrap();
    let back = serde_json::from_str(&json).unwrap();
    assert_eq!(cert, back);
    verify_certificate(&back, &RuleConfig::default()).unwrap();
}

#[test]
fn budget_zero_still_certifies_soundly() {
    match best_certified_bound(&prob(2, &[9, 9]), 0) {
        Err(CovdegError::BudgetExhausted { partial, budget }) => {
            assert_eq!(budget, 0);
            verify_certificate(&partial, &RuleConfig::default()).unwrap();
        }
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn soundness_and_domination(n in 1u32..4, degrees in prop::collection::vec(1u64..10, 0..3)) {
        let p = MultiDegreeProblem::new(n, degrees.clone()).unwrap();
        let cert = best_certified_bound(&p, DEFAULT_BUDGET).unwrap();
        prop_assert!(cert.value() <= &p.degree_product());
        prop_assert!(cert.value() >= &BigUint::one());
        if let Ok(floor) = explicit_lower_bound(&p) {
            prop_assert!(cert.value() >= &floor);
        }
        if n == 1 {
            prop_assert_eq!(cert.value(), &p.degree_product());
        }
        prop_assert!(verify_certificate(&cert, &RuleConfig::default()).is_ok());
    }

    #[test]
    fn symmetric_in_degrees(degrees in prop::collection::vec(1u64..9, 1..3)) {
        let mut reversed = degrees.clone();
        reversed.reverse();
        let a = best_certified_bound(&MultiDegreeProblem::new(2, degrees).unwrap(), DEFAULT_BUDGET).unwrap();
        let b = best_certified_bound(&MultiDegreeProblem::new(2, reversed).unwrap(), DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(a, b);
    }
}
