//! Balancing conditions on dual graphs of curves in a simple normal crossings
//! degeneration: sinking speeds `n_i(v)`, node orders `δ(e)` and vanishing
//! orders `m_i(v, e)`.
//!
//! A labeling is balanced when
//! - (i) `n_i(v) = 0` exactly when `v` does not map into component `i`;
//! - (ii) `∑_i n_i(v) = n` at every vertex;
//! - (iii) across every edge `e = (v, v')` with `v ≠ v'`,
//!   `n_i(v') = n_i(v) + m_i(v, e)·δ(e)` and `m_i(v, e) + m_i(v', e) = 0`;
//! - every flag has `∑_i m_i(v, e) = 0`.
//!
//! Loops are exempt from (iii).

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BalanceError {
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("inadmissible matching instance: {0}")]
    Inadmissible(String),
    #[error("neither breaking case applies to vertex kinds {0:?}")]
    NeitherCase(Vec<VertexKind>),
}

fn malformed<T>(msg: impl Into<String>) -> Result<T, BalanceError> {
    Err(BalanceError::MalformedGraph(msg.into()))
}

/// Vertex type for two-component degenerations `X_1 ∪ X_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum VertexKind {
    /// Contracted to a point of the double locus.
    Ghost,
    /// Maps non-constantly into the double locus.
    TypeZ,
    /// Maps into `X_i` but not into the double locus; holds the position
    /// (1 or 2) of `i` among the components.
    TypeX(u8),
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexKind::Ghost => write!(f, "ghost"),
            VertexKind::TypeZ => write!(f, "z"),
            VertexKind::TypeX(i) => write!(f, "x{i}"),
        }
    }
}

impl FromStr for VertexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ghost" => Ok(VertexKind::Ghost),
            "z" => Ok(VertexKind::TypeZ),
            "x1" => Ok(VertexKind::TypeX(1)),
            "x2" => Ok(VertexKind::TypeX(2)),
            _ => Err(format!("unknown vertex kind {s:?}; expected ghost, z, x1 or x2")),
        }
    }
}

impl TryFrom<String> for VertexKind {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<VertexKind> for String {
    fn from(k: VertexKind) -> String {
        k.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub name: String,
    /// Component ids whose image contains this vertex's component.
    pub maps_into: BTreeSet<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<VertexKind>,
    /// `n_i(v)`, one entry per component in [`LabeledDualGraph::components`]
    /// order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speeds: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub name: String,
    /// Vertex indices of the two flags; equal for a loop.
    pub ends: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<u64>,
    /// `m_i(ends[s], e)` for each side `s`, per component.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<[Vec<i64>; 2]>,
    /// Flags whose sections are known regular where the speed vanishes; their
    /// orders must then be nonnegative.
    #[serde(default)]
    pub regular: [bool; 2],
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }
}

/// A dual graph, optionally labeled. Without `n`, speeds, deltas and orders
/// it serves as a skeleton for [`enumerate_labelings`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledDualGraph {
    /// Component ids, strictly ascending.
    pub components: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl LabeledDualGraph {
    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    /// The graph with `n`, speeds, deltas and orders removed.
    pub fn skeleton(&self) -> LabeledDualGraph {
        let mut g = self.clone();
        g.n = None;
        for v in &mut g.vertices {
            v.speeds = None;
        }
        for e in &mut g.edges {
            e.delta = None;
            e.orders = None;
        }
        g
    }

    /// Structural checks shared by skeletons and labeled graphs.
    pub fn validate_structure(&self) -> Result<(), BalanceError> {
        if self.components.is_empty() {
            return malformed("no components");
        }
        if self.components.windows(2).any(|w| w[0] >= w[1]) {
            return malformed("component ids must be strictly ascending");
        }
        let mut names = HashSet::new();
        for v in &self.vertices {
            if !names.insert(v.name.as_str()) {
                return malformed(format!("duplicate vertex name {:?}", v.name));
            }
            if let Some(c) = v.maps_into.iter().find(|c| !self.components.contains(c)) {
                return malformed(format!("vertex {} maps into unknown component {c}", v.name));
            }
            if let Some(kind) = v.kind {
                self.check_kind(v, kind)?;
            }
        }
        let mut edge_names = HashSet::new();
        for e in &self.edges {
            if !edge_names.insert(e.name.as_str()) {
                return malformed(format!("duplicate edge name {:?}", e.name));
            }
            if e.ends.iter().any(|&i| i >= self.vertices.len()) {
                return malformed(format!("edge {} has an endpoint out of range", e.name));
            }
        }
        Ok(())
    }

    fn check_kind(&self, v: &Vertex, kind: VertexKind) -> Result<(), BalanceError> {
        if self.components.len() != 2 {
            return malformed(format!(
                "vertex {} has a kind but there are {} components",
                v.name,
                self.components.len()
            ));
        }
        let all: BTreeSet<u32> = self.components.iter().copied().collect();
        let ok = match kind {
            VertexKind::Ghost | VertexKind::TypeZ => v.maps_into == all,
            VertexKind::TypeX(i) => {
                (1..=2).contains(&i)
                    && v.maps_into == BTreeSet::from([self.components[i as usize - 1]])
            }
        };
        if !ok {
            return malformed(format!(
                "vertex {} of kind {kind} cannot map into {:?}",
                v.name, v.maps_into
            ));
        }
        Ok(())
    }

    fn speeds(&self, v: usize) -> Result<&[u64], BalanceError> {
        let vx = &self.vertices[v];
        match &vx.speeds {
            Some(s) if s.len() == self.components.len() => Ok(s),
            Some(_) => malformed(format!("vertex {} has the wrong number of speeds", vx.name)),
            None => malformed(format!("vertex {} has no speeds", vx.name)),
        }
    }

    fn orders(&self, e: usize) -> Result<&[Vec<i64>; 2], BalanceError> {
        let edge = &self.edges[e];
        match &edge.orders {
            Some(o) if o.iter().all(|s| s.len() == self.components.len()) => Ok(o),
            Some(_) => malformed(format!("edge {} has the wrong number of orders", edge.name)),
            None => malformed(format!("edge {} has no orders", edge.name)),
        }
    }

    fn delta(&self, e: usize) -> Result<u64, BalanceError> {
        let edge = &self.edges[e];
        match edge.delta {
            Some(0) => malformed(format!("edge {} has delta 0", edge.name)),
            Some(d) => Ok(d),
            None => malformed(format!("edge {} has no delta", edge.name)),
        }
    }
}

/// The first constraint a labeling violates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    /// (i): speed is zero exactly off the image.
    Support { vertex: String, component: u32, speed: u64 },
    /// (ii): speeds sum to `n`.
    SpeedSum { vertex: String, sum: u64, n: u64 },
    /// (iii): `n_i(v') = n_i(v) + m_i(v,e)·δ(e)`.
    Transport { edge: String, component: u32 },
    /// (iii): `m_i(v,e) + m_i(v',e) = 0`.
    Antisymmetry { edge: String, component: u32 },
    /// Orders at one flag sum to zero.
    OrderSum { edge: String, side: usize, sum: i64 },
    /// Regular flag with a negative order where the speed vanishes.
    Regularity { edge: String, side: usize, component: u32, order: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Support { vertex, component, speed } => write!(
                f,
                "(i) vertex {vertex}: speed {speed} for component {component} contradicts its image"
            ),
            Violation::SpeedSum { vertex, sum, n } => {
                write!(f, "(ii) vertex {vertex}: speeds sum to {sum}, expected {n}")
            }
            Violation::Transport { edge, component } => {
                write!(f, "(iii) edge {edge}: speed transport fails for component {component}")
            }
            Violation::Antisymmetry { edge, component } => {
                write!(f, "(iii) edge {edge}: orders of component {component} are not opposite")
            }
            Violation::OrderSum { edge, side, sum } => {
                write!(f, "edge {edge} side {side}: orders sum to {sum}, expected 0")
            }
            Violation::Regularity { edge, side, component, order } => write!(
                f,
                "edge {edge} side {side}: regular flag has order {order} < 0 for component {component}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub balanced: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    /// Loop edges, for which (iii) was not checked.
    pub loops_exempted: Vec<String>,
}

/// Checks (ii), (i), (iii), the flag order sums and the regular-flag filter,
/// reporting the first violation in vertex-then-edge order.
pub fn check_labeling(g: &LabeledDualGraph) -> Result<Verdict, BalanceError> {
    g.validate_structure()?;
    let Some(n) = g.n else {
        return malformed("total order n is missing");
    };
    if n == 0 {
        return malformed("total order n must be positive");
    }
    let loops_exempted: Vec<String> = g
        .edges
        .iter()
        .filter(|e| e.is_loop())
        .map(|e| e.name.clone())
        .collect();
    let fail = |violation| {
        Ok(Verdict {
            balanced: false,
            violation: Some(violation),
            loops_exempted: loops_exempted.clone(),
        })
    };
    // labels must be complete before any condition is judged
    for v in 0..g.vertices.len() {
        g.speeds(v)?;
    }
    for e in 0..g.edges.len() {
        g.delta(e)?;
        g.orders(e)?;
    }
    for (vi, v) in g.vertices.iter().enumerate() {
        let speeds = g.speeds(vi)?;
        let sum: u64 = speeds.iter().sum();
        if sum != n {
            return fail(Violation::SpeedSum {
                vertex: v.name.clone(),
                sum,
                n,
            });
        }
        for (k, &c) in g.components.iter().enumerate() {
            if (speeds[k] == 0) == v.maps_into.contains(&c) {
                return fail(Violation::Support {
                    vertex: v.name.clone(),
                    component: c,
                    speed: speeds[k],
                });
            }
        }
    }
    for (ei, e) in g.edges.iter().enumerate() {
        let delta = g.delta(ei)? as i128;
        let orders = g.orders(ei)?;
        if !e.is_loop() {
            let a = g.speeds(e.ends[0])?;
            let b = g.speeds(e.ends[1])?;
            for (k, &c) in g.components.iter().enumerate() {
                if b[k] as i128 != a[k] as i128 + orders[0][k] as i128 * delta {
                    return fail(Violation::Transport {
                        edge: e.name.clone(),
                        component: c,
                    });
                }
                if orders[0][k] as i128 + orders[1][k] as i128 != 0 {
                    return fail(Violation::Antisymmetry {
                        edge: e.name.clone(),
                        component: c,
                    });
                }
            }
        }
        for side in 0..2 {
            let sum: i64 = orders[side].iter().sum();
            if sum != 0 {
                return fail(Violation::OrderSum {
                    edge: e.name.clone(),
                    side,
                    sum,
                });
            }
        }
        for side in 0..2 {
            if !e.regular[side] {
                continue;
            }
            let speeds = g.speeds(e.ends[side])?;
            for (k, &c) in g.components.iter().enumerate() {
                if speeds[k] == 0 && orders[side][k] < 0 {
                    return fail(Violation::Regularity {
                        edge: e.name.clone(),
                        side,
                        component: c,
                        order: orders[side][k],
                    });
                }
            }
        }
    }
    Ok(Verdict {
        balanced: true,
        violation: None,
        loops_exempted,
    })
}

/// Speed vectors with positive entries exactly at `support` and sum `n`,
/// in lexicographic order.
fn speed_choices(n: u64, len: usize, support: &[bool]) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut current = vec![0u64; len];
    fn rec(k: usize, left: u64, support: &[bool], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if k == cur.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if !support[k] {
            cur[k] = 0;
            rec(k + 1, left, support, cur, out);
            return;
        }
        let later = support[k + 1..].iter().filter(|&&s| s).count() as u64;
        if left < 1 + later {
            return;
        }
        for s in 1..=left - later {
            cur[k] = s;
            rec(k + 1, left - s, support, cur, out);
        }
    }
    rec(0, n, support, &mut current, &mut out);
    out
}

/// All balanced labelings of `skeleton` with total order `n` and node orders
/// `δ(e) ≤ delta_max`, ordered lexicographically by (speeds of each vertex in
/// input order, then δ of each edge in input order).
///
/// Orders across non-loop edges are forced by (iii). Loops get orders 0 and
/// a free δ.
pub fn enumerate_labelings(
    skeleton: &LabeledDualGraph,
    n: u64,
    delta_max: u64,
) -> Result<Vec<LabeledDualGraph>, BalanceError> {
    skeleton.validate_structure()?;
    if n == 0 || delta_max == 0 {
        return malformed("n and delta_max must be positive");
    }
    let len = skeleton.components.len();
    let per_vertex: Vec<Vec<Vec<u64>>> = skeleton
        .vertices
        .iter()
        .map(|v| {
            let support: Vec<bool> = skeleton
                .components
                .iter()
                .map(|c| v.maps_into.contains(c))
                .collect();
            speed_choices(n, len, &support)
        })
        .collect();
    let mut out = Vec::new();
    let mut assignment: Vec<&Vec<u64>> = Vec::with_capacity(per_vertex.len());
    enumerate_speeds(skeleton, n, delta_max, &per_vertex, &mut assignment, &mut out);
    Ok(out)
}

fn enumerate_speeds<'a>(
    skeleton: &LabeledDualGraph,
    n: u64,
    delta_max: u64,
    per_vertex: &'a [Vec<Vec<u64>>],
    assignment: &mut Vec<&'a Vec<u64>>,
    out: &mut Vec<LabeledDualGraph>,
) {
    let k = assignment.len();
    if k == per_vertex.len() {
        emit_deltas(skeleton, n, delta_max, assignment, out);
        return;
    }
    for choice in &per_vertex[k] {
        assignment.push(choice);
        enumerate_speeds(skeleton, n, delta_max, per_vertex, assignment, out);
        assignment.pop();
    }
}

fn emit_deltas(
    skeleton: &LabeledDualGraph,
    n: u64,
    delta_max: u64,
    speeds: &[&Vec<u64>],
    out: &mut Vec<LabeledDualGraph>,
) {
    let len = skeleton.components.len();
    // per edge: speed differences across it, and the admissible deltas
    let mut diffs: Vec<Vec<i64>> = Vec::with_capacity(skeleton.edges.len());
    let mut options: Vec<Vec<u64>> = Vec::with_capacity(skeleton.edges.len());
    for e in &skeleton.edges {
        let diff: Vec<i64> = if e.is_loop() {
            vec![0; len]
        } else {
            (0..len)
                .map(|k| speeds[e.ends[1]][k] as i64 - speeds[e.ends[0]][k] as i64)
                .collect()
        };
        // the sign of an order does not depend on delta, so regular flags
        // can be screened once per speed assignment
        for side in 0..2 {
            if !e.regular[side] || e.is_loop() {
                continue;
            }
            let sign = if side == 0 { 1 } else { -1 };
            let vs = speeds[e.ends[side]];
            if (0..len).any(|k| vs[k] == 0 && sign * diff[k] < 0) {
                return;
            }
        }
        let deltas: Vec<u64> = (1..=delta_max)
            .filter(|&d| diff.iter().all(|x| x % d as i64 == 0))
            .collect();
        if deltas.is_empty() {
            return;
        }
        diffs.push(diff);
        options.push(deltas);
    }
    let mut choice = vec![0usize; options.len()];
    loop {
        let mut g = skeleton.clone();
        g.n = Some(n);
        for (v, s) in g.vertices.iter_mut().zip(speeds) {
            v.speeds = Some((*s).clone());
        }
        for (i, e) in g.edges.iter_mut().enumerate() {
            let delta = options[i][choice[i]];
            let m: Vec<i64> = diffs[i].iter().map(|x| x / delta as i64).collect();
            let neg: Vec<i64> = m.iter().map(|x| -x).collect();
            e.delta = Some(delta);
            e.orders = Some([m, neg]);
        }
        out.push(g);
        // odometer, last edge fastest
        let mut i = options.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// The contracted set of a matching instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Contracted {
    /// A single node joining a type-`X_1` and a type-`X_2` vertex.
    Node { edge: usize },
    /// Ghost vertices forming a connected component of the preimage of the
    /// double locus.
    Vertices { vertices: BTreeSet<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingInstance {
    pub graph: LabeledDualGraph,
    pub contracted: Contracted,
}

/// A flag where the contracted set meets a type-`X` vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryFlag {
    pub edge: String,
    pub vertex: String,
    /// 1 or 2: which component the vertex maps into.
    pub side: u8,
    /// `m_2` at a side-1 vertex, `m_1` at a side-2 vertex.
    pub multiplicity: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingReport {
    pub lhs: i64,
    pub rhs: i64,
    pub equal: bool,
    pub boundary: Vec<BoundaryFlag>,
}

fn kind_of(g: &LabeledDualGraph, v: usize) -> Result<VertexKind, BalanceError> {
    g.vertices[v]
        .kind
        .ok_or_else(|| BalanceError::MalformedGraph(format!("vertex {} has no kind", g.vertices[v].name)))
}

fn inadmissible<T>(msg: impl Into<String>) -> Result<T, BalanceError> {
    Err(BalanceError::Inadmissible(msg.into()))
}

/// Compares the intersection multiplicities with the double locus on either
/// side of a contracted set: `lhs` sums `m_2` over flags at type-`X_1`
/// vertices, `rhs` sums `m_1` over flags at type-`X_2` vertices.
///
/// For a contracted set of ghost vertices the instance is admissible only
/// if, at each of its vertices, the orders of every component sum to zero
/// over all incident flags (sections of a trivial bundle on a proper curve
/// have as many zeros as poles), and loops inside it have opposite orders.
pub fn multiplicity_matching(inst: &MatchingInstance) -> Result<MatchingReport, BalanceError> {
    let g = &inst.graph;
    if g.components.len() != 2 {
        return malformed("matching needs exactly two components");
    }
    let verdict = check_labeling(g)?;
    if !verdict.balanced {
        return inadmissible(format!(
            "labeling is not balanced: {}",
            verdict.violation.expect("violation present")
        ));
    }
    for v in 0..g.vertices.len() {
        kind_of(g, v)?;
    }
    let flag = |ei: usize, side: usize| -> Result<BoundaryFlag, BalanceError> {
        let e = &g.edges[ei];
        let v = e.ends[side];
        let orders = g.orders(ei)?;
        let (s, multiplicity) = match kind_of(g, v)? {
            VertexKind::TypeX(1) => (1, orders[side][1]),
            VertexKind::TypeX(2) => (2, orders[side][0]),
            other => {
                return inadmissible(format!(
                    "edge {} leaves the contracted set into vertex {} of kind {other}",
                    e.name, g.vertices[v].name
                ))
            }
        };
        Ok(BoundaryFlag {
            edge: e.name.clone(),
            vertex: g.vertices[v].name.clone(),
            side: s,
            multiplicity,
        })
    };
    let mut boundary = Vec::new();
    match &inst.contracted {
        Contracted::Node { edge } => {
            let Some(e) = g.edges.get(*edge) else {
                return malformed(format!("edge index {edge} out of range"));
            };
            if e.is_loop() {
                return inadmissible(format!("edge {} is a loop", e.name));
            }
            let kinds = [kind_of(g, e.ends[0])?, kind_of(g, e.ends[1])?];
            let mut sides = kinds;
            sides.sort();
            if sides != [VertexKind::TypeX(1), VertexKind::TypeX(2)] {
                return inadmissible(format!(
                    "node {} must join a type-x1 and a type-x2 vertex",
                    e.name
                ));
            }
            boundary.push(flag(*edge, 0)?);
            boundary.push(flag(*edge, 1)?);
        }
        Contracted::Vertices { vertices } => {
            if let Some(&v) = vertices.iter().find(|&&v| v >= g.vertices.len()) {
                return malformed(format!("vertex index {v} out of range"));
            }
            for &v in vertices {
                if kind_of(g, v)? != VertexKind::Ghost {
                    return inadmissible(format!("vertex {} is not a ghost", g.vertices[v].name));
                }
            }
            if !vertices.is_empty() && !is_double_locus_component(g, vertices)? {
                return inadmissible(
                    "contracted vertices are not a connected component of the double-locus preimage",
                );
            }
            for &v in vertices {
                let mut sums = [0i64; 2];
                for (ei, e) in g.edges.iter().enumerate() {
                    let orders = g.orders(ei)?;
                    for side in 0..2 {
                        if e.ends[side] == v {
                            sums[0] += orders[side][0];
                            sums[1] += orders[side][1];
                        }
                    }
                    if e.is_loop() && e.ends[0] == v && (0..2).any(|k| orders[0][k] + orders[1][k] != 0) {
                        return inadmissible(format!("loop {} has unbalanced orders", e.name));
                    }
                }
                if sums != [0, 0] {
                    return inadmissible(format!(
                        "orders at contracted vertex {} sum to {sums:?}",
                        g.vertices[v].name
                    ));
                }
            }
            for (ei, e) in g.edges.iter().enumerate() {
                let inside = [vertices.contains(&e.ends[0]), vertices.contains(&e.ends[1])];
                match inside {
                    [true, false] => boundary.push(flag(ei, 1)?),
                    [false, true] => boundary.push(flag(ei, 0)?),
                    _ => {}
                }
            }
        }
    }
    let lhs = boundary.iter().filter(|b| b.side == 1).map(|b| b.multiplicity).sum();
    let rhs = boundary.iter().filter(|b| b.side == 2).map(|b| b.multiplicity).sum();
    Ok(MatchingReport {
        lhs,
        rhs,
        equal: lhs == rhs,
        boundary,
    })
}

/// Whether `set` is a connected component of the subgraph induced by the
/// vertices mapping into both components.
fn is_double_locus_component(g: &LabeledDualGraph, set: &BTreeSet<usize>) -> Result<bool, BalanceError> {
    let in_double = |v: usize| -> Result<bool, BalanceError> {
        Ok(matches!(kind_of(g, v)?, VertexKind::Ghost | VertexKind::TypeZ))
    };
    let start = *set.iter().next().expect("nonempty");
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for e in &g.edges {
            for side in 0..2 {
                let w = e.ends[1 - side];
                if e.ends[side] == v && in_double(w)? && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
    }
    Ok(&seen == set)
}

/// Every admissible matching instance of a balanced two-component labeling:
/// each node between type-`X_1` and type-`X_2` vertices, and each
/// double-locus component made of ghosts whose orders balance. Returns the
/// instances and the number of ghost components skipped as inadmissible.
pub fn admissible_instances(g: &LabeledDualGraph) -> Result<(Vec<MatchingInstance>, usize), BalanceError> {
    let mut out = Vec::new();
    let mut skipped = 0;
    for (ei, e) in g.edges.iter().enumerate() {
        if e.is_loop() {
            continue;
        }
        let mut kinds = [kind_of(g, e.ends[0])?, kind_of(g, e.ends[1])?];
        kinds.sort();
        if kinds == [VertexKind::TypeX(1), VertexKind::TypeX(2)] {
            out.push(MatchingInstance {
                graph: g.clone(),
                contracted: Contracted::Node { edge: ei },
            });
        }
    }
    let mut assigned = BTreeSet::new();
    for v in 0..g.vertices.len() {
        if assigned.contains(&v) || !matches!(kind_of(g, v)?, VertexKind::Ghost | VertexKind::TypeZ) {
            continue;
        }
        let mut comp = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for e in &g.edges {
                for side in 0..2 {
                    let w = e.ends[1 - side];
                    if e.ends[side] == u
                        && matches!(kind_of(g, w)?, VertexKind::Ghost | VertexKind::TypeZ)
                        && comp.insert(w)
                    {
                        stack.push(w);
                    }
                }
            }
        }
        assigned.extend(comp.iter().copied());
        if comp.iter().any(|&u| g.vertices[u].kind != Some(VertexKind::Ghost)) {
            continue;
        }
        let inst = MatchingInstance {
            graph: g.clone(),
            contracted: Contracted::Vertices { vertices: comp },
        };
        match multiplicity_matching(&inst) {
            Ok(_) => out.push(inst),
            Err(BalanceError::Inadmissible(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((out, skipped))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BreakingCase {
    /// A type-`Z` component passes through the point.
    A,
    /// Components of type `X_1` and of type `X_2` both pass through it.
    B,
}

/// Which breaking alternative the vertex kinds incident to a marked point
/// of the double locus realize.
pub fn breaking_case(incident: &[VertexKind]) -> Result<BreakingCase, BalanceError> {
    if incident.contains(&VertexKind::TypeZ) {
        Ok(BreakingCase::A)
    } else if incident.contains(&VertexKind::TypeX(1)) && incident.contains(&VertexKind::TypeX(2)) {
        Ok(BreakingCase::B)
    } else {
        Err(BalanceError::NeitherCase(incident.to_vec()))
    }
}
