use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::certificate::{BoundCertificate, CertNode, Rule};
use super::{exact_with, exactness_threshold, may_reach_threshold, CovdegError, ExactnessThreshold};
use super::{MultiDegreeProblem, RuleConfig};
use crate::serde_big;

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    value: BigUint,
    rule: Rule,
    children: Vec<MultiDegreeProblem>,
    depth: usize,
}

/// One solved subproblem, as stored in a persisted memo.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoRecord {
    pub problem: MultiDegreeProblem,
    #[serde(with = "serde_big")]
    pub value: BigUint,
    pub rule: Rule,
    pub children: Vec<MultiDegreeProblem>,
    pub depth: usize,
}

/// Solved subproblems keyed by canonical problem. Only fully explored
/// problems are ever stored, so a memo never depends on the budget that
/// produced it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Memo {
    entries: HashMap<MultiDegreeProblem, Entry>,
}

impl Memo {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Records sorted by problem, for reproducible serialization.
    pub fn records(&self) -> Vec<MemoRecord> {
        let mut out: Vec<MemoRecord> = self
            .entries
            .iter()
            .map(|(p, e)| MemoRecord {
                problem: p.clone(),
                value: e.value.clone(),
                rule: e.rule,
                children: e.children.clone(),
                depth: e.depth,
            })
            .collect();
        out.sort_by(|a, b| a.problem.cmp(&b.problem));
        out
    }

    /// Rebuilds a memo, rejecting dangling children and values above the
    /// degree product.
    pub fn from_records(records: Vec<MemoRecord>) -> Result<Memo, String> {
        let mut entries = HashMap::with_capacity(records.len());
        for rec in records {
            if rec.value > rec.problem.degree_product() {
                return Err(format!("{}: value exceeds the degree product", rec.problem));
            }
            entries.insert(
                rec.problem,
                Entry {
                    value: rec.value,
                    rule: rec.rule,
                    children: rec.children,
                    depth: rec.depth,
                },
            );
        }
        for (p, e) in &entries {
            if let Some(c) = e.children.iter().find(|c| !entries.contains_key(*c)) {
                return Err(format!("{p}: child {c} is missing"));
            }
        }
        Ok(Memo { entries })
    }
}

struct Candidate {
    rule: Rule,
    children: Vec<MultiDegreeProblem>,
}

struct Frame {
    problem: MultiDegreeProblem,
    candidates: Vec<Candidate>,
    cand: usize,
    child: usize,
}

/// Memoized search for the largest lower bound derivable from the rule set.
pub struct Engine {
    config: RuleConfig,
    memo: Memo,
    thresholds: HashMap<(u32, usize), Option<ExactnessThreshold>>,
    last_insertions: usize,
}

impl Engine {
    pub fn new(config: RuleConfig) -> Self {
        Self::with_memo(config, Memo::default())
    }

    pub fn with_memo(config: RuleConfig, memo: Memo) -> Self {
        Engine {
            config,
            memo,
            thresholds: HashMap::new(),
            last_insertions: 0,
        }
    }

    pub fn config(&self) -> RuleConfig {
        self.config
    }

    pub fn memo(&self) -> &Memo {
        &self.memo
    }

    pub fn into_memo(self) -> Memo {
        self.memo
    }

    /// Memo entries added by the most recent [`Engine::certify`] call.
    pub fn last_insertions(&self) -> usize {
        self.last_insertions
    }

    fn threshold(&mut self, n: u32, r: usize) -> Option<&ExactnessThreshold> {
        self.thresholds
            .entry((n, r))
            .or_insert_with(|| exactness_threshold(n, r).ok())
            .as_ref()
    }

    fn leaf(&mut self, p: &MultiDegreeProblem) -> Option<Entry> {
        let (rule, value) = if p.r() == 0 {
            (Rule::AmbientSpace, BigUint::one())
        } else if p.n() == 1 {
            (Rule::CurveExact, p.degree_product())
        } else if self.config.exactness
            && may_reach_threshold(p)
            && self
                .threshold(p.n(), p.r())
                .cloned()
                .is_some_and(|t| exact_with(p, &t))
        {
            (Rule::ExactByCoprimeArray, p.degree_product())
        } else {
            return None;
        };
        Some(Entry {
            value,
            rule,
            children: vec![],
            depth: 0,
        })
    }

    fn fano_applies(&self, p: &MultiDegreeProblem) -> bool {
        self.config.fano_floor && p.degree_sum() == p.n() as u128 + p.r() as u128
    }

    /// Best bound using leaf rules only; sound for any problem.
    fn leaf_only(&mut self, p: &MultiDegreeProblem) -> Entry {
        if let Some(e) = self.leaf(p) {
            return e;
        }
        let (rule, value) = if self.fano_applies(p) {
            (Rule::FanoFloor, BigUint::from(2u32))
        } else {
            (Rule::ProductFloor, BigUint::one())
        };
        Entry {
            value,
            rule,
            children: vec![],
            depth: 0,
        }
    }

    fn candidates(&self, p: &MultiDegreeProblem) -> Vec<Candidate> {
        if let Some(child) = p.without(1) {
            return vec![Candidate {
                rule: Rule::DropOne,
                children: vec![child],
            }];
        }
        let mut out = Vec::new();
        if let Some(child) = p.without(p.n() as u64) {
            out.push(Candidate {
                rule: Rule::DropDim,
                children: vec![child],
            });
        }
        let mut distinct: Vec<u64> = p.degrees().to_vec();
        distinct.dedup();
        for d in distinct {
            for s in 1..=d / 2 {
                let a = d - s;
                let children = vec![
                    p.replacing(d, &[a], p.n()).expect("degree present"),
                    p.replacing(d, &[s], p.n()).expect("degree present"),
                    p.replacing(d, &[a, s], p.n() - 1).expect("degree present"),
                ];
                out.push(Candidate {
                    rule: Rule::Split { a, b: s },
                    children,
                });
            }
        }
        if self.fano_applies(p) {
            out.push(Candidate {
                rule: Rule::FanoFloor,
                children: vec![],
            });
        }
        out.push(Candidate {
            rule: Rule::ProductFloor,
            children: vec![],
        });
        out
    }

    fn evaluate(cand: &Candidate, values: &[&Entry]) -> Entry {
        let value = match cand.rule {
            Rule::DropOne | Rule::DropDim => values[0].value.clone(),
            Rule::Split { .. } => {
                let sum = &values[0].value + &values[1].value;
                sum.min(values[2].value.clone())
            }
            Rule::FanoFloor => BigUint::from(2u32),
            Rule::ProductFloor => BigUint::one(),
            Rule::CurveExact | Rule::AmbientSpace | Rule::ExactByCoprimeArray => {
                unreachable!("leaf rules are not candidates")
            }
        };
        let depth = values.iter().map(|e| e.depth + 1).max().unwrap_or(0);
        Entry {
            value,
            rule: cand.rule,
            children: cand.children.clone(),
            depth,
        }
    }

    /// Maximum value, then minimum depth, then earliest candidate.
    fn select<'a, F>(candidates: &[Candidate], mut lookup: F) -> Entry
    where
        F: FnMut(&MultiDegreeProblem) -> &'a Entry,
    {
        let mut best: Option<Entry> = None;
        for cand in candidates {
            let values: Vec<&Entry> = cand.children.iter().map(&mut lookup).collect();
            let entry = Self::evaluate(cand, &values);
            let better = match &best {
                None => true,
                Some(b) => entry.value > b.value || (entry.value == b.value && entry.depth < b.depth),
            };
            if better {
                best = Some(entry);
            }
        }
        best.expect("ProductFloor is always a candidate")
    }

    fn insert(&mut self, p: MultiDegreeProblem, entry: Entry) {
        assert!(
            entry.value <= p.degree_product(),
            "soundness cap violated at {p}: {}",
            entry.value
        );
        self.memo.entries.insert(p, entry);
        self.last_insertions += 1;
    }

    fn new_frame(&self, p: MultiDegreeProblem) -> Frame {
        let candidates = self.candidates(&p);
        Frame {
            problem: p,
            candidates,
            cand: 0,
            child: 0,
        }
    }

    /// Certified lower bound for `p`. At most `budget` new memo entries are
    /// created; on exhaustion the error carries a sound partial certificate.
    pub fn certify(
        &mut self,
        p: &MultiDegreeProblem,
        budget: usize,
    ) -> Result<BoundCertificate, CovdegError> {
        self.last_insertions = 0;
        let mut stack: Vec<Frame> = Vec::new();
        let mut pending = Some(p.clone());
        loop {
            if let Some(q) = pending.take() {
                if !self.memo.entries.contains_key(&q) {
                    if let Some(leaf) = self.leaf(&q) {
                        if self.last_insertions >= budget {
                            return Err(self.exhausted(p, stack, Some(q), budget));
                        }
                        self.insert(q, leaf);
                    } else {
                        stack.push(self.new_frame(q));
                    }
                }
            }
            let Some(frame) = stack.last_mut() else { break };
            // advance to the next child that still needs solving
            let mut next = None;
            while frame.cand < frame.candidates.len() {
                let cand = &frame.candidates[frame.cand];
                if frame.child < cand.children.len() {
                    let child = &cand.children[frame.child];
                    frame.child += 1;
                    if !self.memo.entries.contains_key(child) {
                        next = Some(child.clone());
                        break;
                    }
                } else {
                    frame.cand += 1;
                    frame.child = 0;
                }
            }
            if next.is_some() {
                pending = next;
                continue;
            }
            if self.last_insertions >= budget {
                return Err(self.exhausted(p, stack, None, budget));
            }
            let frame = stack.pop().expect("frame present");
            let memo = &self.memo.entries;
            let entry = Self::select(&frame.candidates, |c| &memo[c]);
            self.insert(frame.problem, entry);
        }
        Ok(self.build_certificate(p, &HashMap::new()))
    }

    fn exhausted(
        &mut self,
        root: &MultiDegreeProblem,
        stack: Vec<Frame>,
        extra: Option<MultiDegreeProblem>,
        budget: usize,
    ) -> CovdegError {
        let mut partial: HashMap<MultiDegreeProblem, Entry> = HashMap::new();
        if let Some(q) = extra {
            let e = self.leaf_only(&q);
            partial.insert(q, e);
        }
        // deepest frames first, so shallower ones can use their results
        for frame in stack.into_iter().rev() {
            for cand in &frame.candidates {
                for c in &cand.children {
                    if !self.memo.entries.contains_key(c) && !partial.contains_key(c) {
                        let e = self.leaf_only(c);
                        partial.insert(c.clone(), e);
                    }
                }
            }
            let memo = &self.memo.entries;
            let entry = Self::select(&frame.candidates, |c| {
                memo.get(c).unwrap_or_else(|| &partial[c])
            });
            assert!(entry.value <= frame.problem.degree_product());
            partial.insert(frame.problem, entry);
        }
        CovdegError::BudgetExhausted {
            partial: Box::new(self.build_certificate(root, &partial)),
            budget,
        }
    }

    fn build_certificate(
        &self,
        root: &MultiDegreeProblem,
        partial: &HashMap<MultiDegreeProblem, Entry>,
    ) -> BoundCertificate {
        let lookup = |q: &MultiDegreeProblem| -> &Entry {
            self.memo
                .entries
                .get(q)
                .or_else(|| partial.get(q))
                .expect("every reachable problem is solved")
        };
        let mut ids: HashMap<MultiDegreeProblem, usize> = HashMap::new();
        let mut nodes: Vec<CertNode> = Vec::new();
        let mut on_stack: HashSet<MultiDegreeProblem> = HashSet::new();
        let mut stack: Vec<(MultiDegreeProblem, usize)> = vec![(root.clone(), 0)];
        on_stack.insert(root.clone());
        while let Some((q, i)) = stack.last().cloned() {
            let entry = lookup(&q);
            if let Some(child) = entry.children.get(i) {
                stack.last_mut().expect("nonempty").1 += 1;
                if !ids.contains_key(child) && on_stack.insert(child.clone()) {
                    stack.push((child.clone(), 0));
                }
                continue;
            }
            stack.pop();
            let children = entry.children.iter().map(|c| ids[c]).collect();
            let notes = if entry.rule == Rule::ExactByCoprimeArray {
                let t = &self.thresholds[&(q.n(), q.r())];
                format!(
                    "degrees >= {}",
                    t.as_ref().map(|t| t.threshold.to_string()).unwrap_or_default()
                )
            } else {
                String::new()
            };
            ids.insert(q.clone(), nodes.len());
            nodes.push(CertNode {
                problem: q,
                value: entry.value.clone(),
                rule: entry.rule,
                children,
                notes,
            });
        }
        let root = nodes.len() - 1;
        BoundCertificate { nodes, root }
    }
}

/// One-shot search with the default rule configuration.
pub fn best_certified_bound(
    p: &MultiDegreeProblem,
    budget: usize,
) -> Result<BoundCertificate, CovdegError> {
    Engine::new(RuleConfig::default()).certify(p, budget)
}
