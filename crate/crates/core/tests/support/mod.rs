//! Independent oracles shared by the integration and acceptance suites.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use covbound_core::snc_balance::{Edge, LabeledDualGraph, Vertex, VertexKind};

/// Plain recursive evaluation of the covering-degree rule set, written
/// independently of the engine. Valid while degrees stay far below any
/// exactness threshold.
pub fn covdeg_oracle(n: u32, mut degrees: Vec<u64>, memo: &mut HashMap<(u32, Vec<u64>), u128>) -> u128 {
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    if degrees.is_empty() {
        return 1;
    }
    if n == 1 {
        return degrees.iter().map(|&d| d as u128).product();
    }
    let key = (n, degrees.clone());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let value = if let Some(pos) = degrees.iter().position(|&d| d == 1) {
        let mut rest = degrees.clone();
        rest.remove(pos);
        covdeg_oracle(n, rest, memo)
    } else {
        let mut best = 1u128;
        if let Some(pos) = degrees.iter().position(|&d| d == n as u64) {
            let mut rest = degrees.clone();
            rest.remove(pos);
            best = best.max(covdeg_oracle(n, rest, memo));
        }
        for i in 0..degrees.len() {
            let d = degrees[i];
            for a in 1..d {
                let b = d - a;
                let mut with_a = degrees.clone();
                with_a[i] = a;
                let mut with_b = degrees.clone();
                with_b[i] = b;
                let mut both = degrees.clone();
                both[i] = a;
                both.push(b);
                let split = (covdeg_oracle(n, with_a, memo) + covdeg_oracle(n, with_b, memo))
                    .min(covdeg_oracle(n - 1, both, memo));
                best = best.max(split);
            }
        }
        best
    };
    memo.insert(key, value);
    value
}

/// Labels of one labeling, in the enumerator's canonical sort key order:
/// speeds per vertex, then (delta, orders) per edge.
pub type LabelKey = (Vec<Vec<u64>>, Vec<(u64, [Vec<i64>; 2])>);

pub fn label_key(g: &LabeledDualGraph) -> LabelKey {
    (
        g.vertices.iter().map(|v| v.speeds.clone().unwrap()).collect(),
        g.edges
            .iter()
            .map(|e| (e.delta.unwrap(), e.orders.clone().unwrap()))
            .collect(),
    )
}

fn all_vectors(len: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                (lo..=hi).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// Exhaustive search over speeds in `[0, n]`, deltas in `[1, delta_max]` and
/// orders in `[-n, n]` on every flag, checking each condition directly.
/// Conditions on an edge involve only that edge and the speeds, so the
/// per-edge candidate sets are searched independently and combined. Loops
/// carry zero orders, matching the enumerator's convention.
pub fn brute_force_labelings(
    skeleton: &LabeledDualGraph,
    n: u64,
    delta_max: u64,
    cache: &mut EdgeCache,
) -> Vec<LabelKey> {
    let len = skeleton.components.len();
    let speed_options: Vec<Vec<Vec<u64>>> = skeleton
        .vertices
        .iter()
        .map(|v| {
            all_vectors(len, 0, n as i64)
                .into_iter()
                .map(|s| s.into_iter().map(|x| x as u64).collect::<Vec<u64>>())
                .filter(|s| s.iter().sum::<u64>() == n)
                .filter(|s| {
                    skeleton
                        .components
                        .iter()
                        .zip(s)
                        .all(|(c, &x)| (x > 0) == v.maps_into.contains(c))
                })
                .collect()
        })
        .collect();
    let order_options = all_vectors(len, -(n as i64), n as i64);
    let mut results = Vec::new();
    let mut speeds: Vec<Vec<u64>> = Vec::new();
    let mut search = Search {
        skeleton,
        delta_max,
        speed_options: &speed_options,
        order_options: &order_options,
        cache,
    };
    search.speeds(&mut speeds, &mut results);
    results.sort();
    results
}

/// Valid (delta, orders) per edge situation: (speeds at both ends, delta
/// bound, regular flags, loop). Shared across calls to keep the exhaustive
/// search affordable.
pub type EdgeCache = HashMap<(Vec<u64>, Vec<u64>, u64, [bool; 2], bool), Vec<(u64, [Vec<i64>; 2])>>;

struct Search<'a> {
    skeleton: &'a LabeledDualGraph,
    delta_max: u64,
    speed_options: &'a [Vec<Vec<u64>>],
    order_options: &'a [Vec<i64>],
    cache: &'a mut EdgeCache,
}

impl Search<'_> {
    fn edge_options(&mut self, e: &Edge, a: &[u64], b: &[u64]) -> Vec<(u64, [Vec<i64>; 2])> {
        let key = (a.to_vec(), b.to_vec(), self.delta_max, e.regular, e.is_loop());
        if let Some(v) = self.cache.get(&key) {
            return v.clone();
        }
        let mut valid = Vec::new();
        for delta in 1..=self.delta_max {
            if e.is_loop() {
                let zero = vec![0; a.len()];
                valid.push((delta, [zero.clone(), zero]));
                continue;
            }
            for m0 in self.order_options {
                for m1 in self.order_options {
                    if edge_ok(e, delta, m0, m1, a, b) {
                        valid.push((delta, [m0.clone(), m1.clone()]));
                    }
                }
            }
        }
        self.cache.insert(key, valid.clone());
        valid
    }

    fn speeds(&mut self, speeds: &mut Vec<Vec<u64>>, results: &mut Vec<LabelKey>) {
        if speeds.len() == self.speed_options.len() {
            let skeleton = self.skeleton;
            let mut per_edge: Vec<Vec<(u64, [Vec<i64>; 2])>> = Vec::new();
            for e in &skeleton.edges {
                let valid = self.edge_options(e, &speeds[e.ends[0]], &speeds[e.ends[1]]);
                if valid.is_empty() {
                    return;
                }
                per_edge.push(valid);
            }
            let mut combos: Vec<Vec<(u64, [Vec<i64>; 2])>> = vec![vec![]];
            for options in per_edge {
                combos = combos
                    .into_iter()
                    .flat_map(|prefix| {
                        options.iter().map(move |o| {
                            let mut p = prefix.clone();
                            p.push(o.clone());
                            p
                        })
                    })
                    .collect();
            }
            for c in combos {
                results.push((speeds.clone(), c));
            }
            return;
        }
        let options = self.speed_options;
        for s in &options[speeds.len()] {
            speeds.push(s.clone());
            self.speeds(speeds, results);
            speeds.pop();
        }
    }
}

fn edge_ok(e: &Edge, delta: u64, m0: &[i64], m1: &[i64], a: &[u64], b: &[u64]) -> bool {
    let delta = delta as i64;
    for k in 0..m0.len() {
        if b[k] as i64 != a[k] as i64 + m0[k] * delta {
            return false;
        }
        if m0[k] + m1[k] != 0 {
            return false;
        }
    }
    if m0.iter().sum::<i64>() != 0 || m1.iter().sum::<i64>() != 0 {
        return false;
    }
    for (side, (m, s)) in [(m0, a), (m1, b)].into_iter().enumerate() {
        if e.regular[side] && (0..m.len()).any(|k| s[k] == 0 && m[k] < 0) {
            return false;
        }
    }
    true
}

/// Graph shapes on at most four vertices: every simple graph up to
/// isomorphism, plus variants with a loop and with a doubled edge.
pub fn graph_shapes() -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut shapes: Vec<(usize, Vec<(usize, usize)>)> = vec![
        (1, vec![]),
        (2, vec![]),
        (2, vec![(0, 1)]),
        (3, vec![]),
        (3, vec![(0, 1)]),
        (3, vec![(0, 1), (1, 2)]),
        (3, vec![(0, 1), (1, 2), (0, 2)]),
        (4, vec![]),
        (4, vec![(0, 1)]),
        (4, vec![(0, 1), (2, 3)]),
        (4, vec![(0, 1), (1, 2)]),
        (4, vec![(0, 1), (1, 2), (2, 3)]),
        (4, vec![(0, 1), (0, 2), (0, 3)]),
        (4, vec![(0, 1), (1, 2), (0, 2)]),
        (4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]),
        (4, vec![(0, 1), (1, 2), (0, 2), (2, 3)]),
        (4, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]),
        (4, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]),
    ];
    let mut extra = Vec::new();
    for (v, edges) in &shapes {
        let mut looped = edges.clone();
        looped.push((0, 0));
        extra.push((*v, looped));
        if let Some(&first) = edges.first() {
            let mut doubled = edges.clone();
            doubled.push(first);
            extra.push((*v, doubled));
        }
    }
    shapes.extend(extra);
    shapes
}

/// Kind implied by the image for two components `[1, 2]`; vertices mapping
/// into both are ghosts.
pub fn kind_for(maps: &BTreeSet<u32>) -> Option<VertexKind> {
    match maps.iter().copied().collect::<Vec<_>>().as_slice() {
        [1] => Some(VertexKind::TypeX(1)),
        [2] => Some(VertexKind::TypeX(2)),
        [1, 2] => Some(VertexKind::Ghost),
        _ => None,
    }
}

pub fn skeleton(
    components: &[u32],
    maps: &[BTreeSet<u32>],
    edges: &[(usize, usize)],
    regular: bool,
) -> LabeledDualGraph {
    LabeledDualGraph {
        components: components.to_vec(),
        n: None,
        vertices: maps
            .iter()
            .enumerate()
            .map(|(i, m)| Vertex {
                name: format!("v{i}"),
                maps_into: m.clone(),
                kind: if components == [1, 2] { kind_for(m) } else { None },
                speeds: None,
            })
            .collect(),
        edges: edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Edge {
                name: format!("e{i}"),
                ends: [a, b],
                delta: None,
                orders: None,
                regular: [regular; 2],
            })
            .collect(),
    }
}

/// Every nonempty-image assignment for `vertices` vertices over `components`.
pub fn image_assignments(components: &[u32], vertices: usize) -> Vec<Vec<BTreeSet<u32>>> {
    let subsets: Vec<BTreeSet<u32>> = (1u32..(1 << components.len()))
        .map(|mask| {
            components
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &c)| c)
                .collect()
        })
        .collect();
    let mut out: Vec<Vec<BTreeSet<u32>>> = vec![vec![]];
    for _ in 0..vertices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                subsets.iter().map(move |s| {
                    let mut p = prefix.clone();
                    p.push(s.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// The full two-component skeleton universe: every shape, every image
/// assignment, with and without regular flags.
pub fn skeleton_universe() -> Vec<LabeledDualGraph> {
    let mut out = Vec::new();
    for (v, edges) in graph_shapes() {
        for maps in image_assignments(&[1, 2], v) {
            for regular in [false, true] {
                out.push(skeleton(&[1, 2], &maps, &edges, regular));
            }
        }
    }
    out
}
