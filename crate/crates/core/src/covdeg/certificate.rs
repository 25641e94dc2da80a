use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{exactness_threshold, MultiDegreeProblem, RuleConfig};
use crate::paulsen;
use crate::serde_big;

/// The rule that justified a node's lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    /// `n = 1`: the value is the degree product.
    CurveExact,
    /// `r = 0`: projective space, value 1.
    AmbientSpace,
    /// A degree equal to 1 is dropped; equal value.
    DropOne,
    /// A degree equal to `n` is dropped; the child bounds the parent.
    DropDim,
    /// One degree `a + b` degenerates to `a` and `b`; children are
    /// `[a-branch, b-branch, lower-dimensional intersection]`.
    Split { a: u64, b: u64 },
    ProductFloor,
    /// `∑d_i = n + r` gives value 2; only accepted when enabled.
    FanoFloor,
    /// All degrees above the exactness threshold; value is the product.
    ExactByCoprimeArray,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::CurveExact => write!(f, "CurveExact"),
            Rule::AmbientSpace => write!(f, "AmbientSpace"),
            Rule::DropOne => write!(f, "DropOne"),
            Rule::DropDim => write!(f, "DropDim"),
            Rule::Split { a, b } => write!(f, "Split({a},{b})"),
            Rule::ProductFloor => write!(f, "ProductFloor"),
            Rule::FanoFloor => write!(f, "FanoFloor"),
            Rule::ExactByCoprimeArray => write!(f, "ExactByCoprimeArray"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertNode {
    pub problem: MultiDegreeProblem,
    #[serde(with = "serde_big")]
    pub value: BigUint,
    pub rule: Rule,
    /// Indices into [`BoundCertificate::nodes`]; always smaller than this
    /// node's own index.
    pub children: Vec<usize>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

/// Derivation DAG for a certified lower bound. Nodes are stored in
/// post-order (children first) and shared subproblems appear once; the root
/// is the last node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub nodes: Vec<CertNode>,
    pub root: usize,
}

impl BoundCertificate {
    pub fn root_node(&self) -> &CertNode {
        &self.nodes[self.root]
    }

    pub fn value(&self) -> &BigUint {
        &self.root_node().value
    }

    pub fn rule(&self) -> Rule {
        self.root_node().rule
    }

    pub fn problem(&self) -> &MultiDegreeProblem {
        &self.root_node().problem
    }

    pub fn children(&self, node: usize) -> impl Iterator<Item = &CertNode> {
        self.nodes[node].children.iter().map(|&c| &self.nodes[c])
    }

    /// Longest root-to-leaf chain.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            depth[i] = node
                .children
                .iter()
                .map(|&c| depth[c] + 1)
                .max()
                .unwrap_or(0);
        }
        depth[self.root]
    }

    /// Path of node indices from the root to `target`, if reachable.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([self.root]);
        seen.get_mut(self.root).map(|s| *s = true)?;
        while let Some(i) = queue.pop_front() {
            if i == target {
                let mut path = vec![i];
                let mut cur = i;
                while let Some(p) = parent[cur] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &c in &self.nodes[i].children {
                if c < self.nodes.len() && !seen[c] {
                    seen[c] = true;
                    parent[c] = Some(i);
                    queue.push_back(c);
                }
            }
        }
        None
    }
}

/// First node that failed independent re-verification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node {node} ({problem}, path {path:?}): {reason}")]
pub struct VerificationFailure {
    pub node: usize,
    pub path: Vec<usize>,
    pub problem: String,
    pub reason: String,
}

/// Re-checks every node's rule hypothesis and arithmetic from the stored
/// data alone. No memo table or engine state is consulted.
pub fn verify_certificate(
    cert: &BoundCertificate,
    config: &RuleConfig,
) -> Result<(), VerificationFailure> {
    if cert.root >= cert.nodes.len() {
        return Err(VerificationFailure {
            node: cert.root,
            path: vec![],
            problem: String::new(),
            reason: "root index out of range".into(),
        });
    }
    for (i, node) in cert.nodes.iter().enumerate() {
        if let Err(reason) = check_node(cert, i, node, config) {
            return Err(VerificationFailure {
                node: i,
                path: cert.path_to(i).unwrap_or_default(),
                problem: node.problem.to_string(),
                reason,
            });
        }
    }
    Ok(())
}

fn expect_children(node: &CertNode, count: usize) -> Result<(), String> {
    if node.children.len() != count {
        return Err(format!(
            "rule {} needs {count} children, found {}",
            node.rule,
            node.children.len()
        ));
    }
    Ok(())
}

fn expect_child_problem(
    child: &CertNode,
    expected: Option<MultiDegreeProblem>,
    what: &str,
) -> Result<(), String> {
    match expected {
        Some(p) if p == child.problem => Ok(()),
        Some(p) => Err(format!("{what} child is {} but should be {p}", child.problem)),
        None => Err(format!("{what} rule does not apply to this problem")),
    }
}

fn check_node(
    cert: &BoundCertificate,
    index: usize,
    node: &CertNode,
    config: &RuleConfig,
) -> Result<(), String> {
    let p = &node.problem;
    let canonical = MultiDegreeProblem::new(p.n(), p.degrees().to_vec())
        .map_err(|e| format!("malformed problem: {e}"))?;
    if &canonical != p {
        return Err("problem is not in canonical form".into());
    }
    for &c in &node.children {
        if c >= index {
            return Err(format!("child index {c} does not precede its parent"));
        }
    }
    let product = p.degree_product();
    if node.value > product {
        return Err(format!(
            "value {} exceeds the degree product {product}",
            node.value
        ));
    }
    let child = |k: usize| &cert.nodes[node.children[k]];
    match node.rule {
        Rule::CurveExact => {
            expect_children(node, 0)?;
            if p.n() != 1 {
                return Err("CurveExact needs n = 1".into());
            }
            if node.value != product {
                return Err("CurveExact value must equal the degree product".into());
            }
        }
        Rule::AmbientSpace => {
            expect_children(node, 0)?;
            if p.r() != 0 || !node.value.is_one() {
                return Err("AmbientSpace needs r = 0 and value 1".into());
            }
        }
        Rule::ProductFloor => {
            expect_children(node, 0)?;
            if !node.value.is_one() {
                return Err("ProductFloor value must be 1".into());
            }
        }
        Rule::FanoFloor => {
            expect_children(node, 0)?;
            if !config.fano_floor {
                return Err("FanoFloor is disabled".into());
            }
            if p.degree_sum() != p.n() as u128 + p.r() as u128 {
                return Err("FanoFloor needs sum of degrees = n + r".into());
            }
            if node.value != BigUint::from(2u32) {
                return Err("FanoFloor value must be 2".into());
            }
        }
        Rule::DropOne | Rule::DropDim => {
            expect_children(node, 1)?;
            let dropped = if node.rule == Rule::DropOne {
                1
            } else {
                p.n() as u64
            };
            expect_child_problem(child(0), p.without(dropped), &node.rule.to_string())?;
            if node.value != child(0).value {
                return Err(format!(
                    "value {} differs from child value {}",
                    node.value,
                    child(0).value
                ));
            }
        }
        Rule::Split { a, b } => {
            expect_children(node, 3)?;
            if a == 0 || b == 0 {
                return Err("split parts must be positive".into());
            }
            if p.n() < 2 {
                return Err("split needs n >= 2".into());
            }
            let whole = a
                .checked_add(b)
                .ok_or_else(|| "split parts overflow".to_string())?;
            expect_child_problem(child(0), p.replacing(whole, &[a], p.n()), "first split")?;
            expect_child_problem(child(1), p.replacing(whole, &[b], p.n()), "second split")?;
            expect_child_problem(
                child(2),
                p.replacing(whole, &[a, b], p.n() - 1),
                "intersection",
            )?;
            let sum = &child(0).value + &child(1).value;
            let expected = sum.min(child(2).value.clone());
            if node.value != expected {
                return Err(format!(
                    "split value {} should be min({} + {}, {}) = {expected}",
                    node.value,
                    child(0).value,
                    child(1).value,
                    child(2).value
                ));
            }
        }
        Rule::ExactByCoprimeArray => {
            expect_children(node, 0)?;
            if node.value != product {
                return Err("exact value must equal the degree product".into());
            }
            let threshold =
                exactness_threshold(p.n(), p.r()).map_err(|e| format!("no exactness route: {e}"))?;
            let degrees: Vec<BigUint> = p.degrees().iter().map(|&d| BigUint::from(d)).collect();
            if degrees.iter().any(|d| d < &threshold.threshold) {
                return Err(format!("degrees below the threshold {}", threshold.threshold));
            }
            let array = paulsen::build_coprime_array_with(
                p.n(),
                &BigUint::from(threshold.k),
                &degrees,
                threshold.generators.clone(),
                threshold.threshold.clone(),
            )
            .map_err(|e| e.to_string())?;
            paulsen::check_coprime_array(&array).map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}
