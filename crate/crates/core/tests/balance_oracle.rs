mod support;

use std::collections::BTreeSet;

use covbound_core::snc_balance::{
    admissible_instances, breaking_case, check_labeling, enumerate_labelings, multiplicity_matching,
    BreakingCase, VertexKind,
};
use support::{brute_force_labelings, label_key, skeleton, skeleton_universe, EdgeCache};

#[test]
fn enumerator_matches_brute_force_on_universe() {
    let mut cache = EdgeCache::new();
    let mut compared = 0;
    for skel in skeleton_universe() {
        for n in 1..=3 {
            for delta_max in 1..=3 {
                let listed = enumerate_labelings(&skel, n, delta_max).unwrap();
                let keys: Vec<_> = listed.iter().map(label_key).collect();
                let oracle = brute_force_labelings(&skel, n, delta_max, &mut cache);
                assert_eq!(keys, oracle, "skeleton {skel:?}, n={n}, delta_max={delta_max}");
                compared += 1;
            }
        }
    }
    assert!(compared > 10_000);
}

#[test]
fn three_component_skeletons_match() {
    let mut cache = EdgeCache::new();
    let comps = [1, 2, 3];
    let sets = |xs: &[&[u32]]| -> Vec<BTreeSet<u32>> {
        xs.iter().map(|x| x.iter().copied().collect()).collect()
    };
    let cases = [
        (sets(&[&[1], &[2, 3]]), vec![(0, 1)]),
        (sets(&[&[1, 2], &[2, 3], &[1, 2, 3]]), vec![(0, 1), (1, 2), (0, 2)]),
        (sets(&[&[1, 2, 3], &[3]]), vec![(0, 1), (0, 0)]),
    ];
    for (maps, edges) in cases {
        for regular in [false, true] {
            let skel = skeleton(&comps, &maps, &edges, regular);
            for n in 1..=4 {
                let listed: Vec<_> = enumerate_labelings(&skel, n, 3).unwrap().iter().map(label_key).collect();
                assert_eq!(listed, brute_force_labelings(&skel, n, 3, &mut cache));
            }
        }
    }
}

#[test]
fn enumerated_labelings_are_balanced_and_divisible() {
    for skel in skeleton_universe().into_iter().step_by(7) {
        for g in enumerate_labelings(&skel, 3, 3).unwrap() {
            let verdict = check_labeling(&g).unwrap();
            assert!(verdict.balanced);
            for e in g.edges.iter().filter(|e| !e.is_loop()) {
                let a = g.vertices[e.ends[0]].speeds.as_ref().unwrap();
                let b = g.vertices[e.ends[1]].speeds.as_ref().unwrap();
                let d = e.delta.unwrap() as i64;
                let orders = e.orders.as_ref().unwrap();
                for k in 0..a.len() {
                    assert_eq!((b[k] as i64 - a[k] as i64) % d, 0);
                    assert_eq!(orders[0][k] + orders[1][k], 0);
                }
            }
        }
    }
}

#[test]
fn matching_holds_on_every_admissible_instance() {
    let mut checked = 0;
    let mut skipped = 0;
    for skel in skeleton_universe() {
        for g in enumerate_labelings(&skel, 3, 3).unwrap() {
            let (instances, unbalanced) = admissible_instances(&g).unwrap();
            skipped += unbalanced;
            for inst in instances {
                let report = multiplicity_matching(&inst).unwrap();
                assert!(report.equal, "{report:?} on {inst:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
    assert!(skipped > 0);
}

#[test]
fn matched_contracted_sets_realize_case_b() {
    for skel in skeleton_universe().into_iter().step_by(5) {
        for g in enumerate_labelings(&skel, 2, 2).unwrap() {
            for inst in admissible_instances(&g).unwrap().0 {
                let report = multiplicity_matching(&inst).unwrap();
                let kinds: Vec<VertexKind> = report
                    .boundary
                    .iter()
                    .map(|b| VertexKind::TypeX(b.side))
                    .collect();
                // a positive multiplicity on one side forces the other side
                if report.lhs > 0 {
                    assert_eq!(breaking_case(&kinds).unwrap(), BreakingCase::B);
                }
            }
        }
    }
}
