//! Certified lower bounds for the covering degree `cd_{n,r}(d_1, …, d_r)` of
//! a general complete intersection of dimension `n` and codimension `r`.

mod certificate;
mod engine;
mod problem;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::paulsen::{self, GeneratorPair, PaulsenError};
use crate::serde_big;

pub use certificate::{verify_certificate, BoundCertificate, CertNode, Rule, VerificationFailure};
pub use engine::{best_certified_bound, Engine, Memo, MemoRecord, DEFAULT_BUDGET};
pub use problem::MultiDegreeProblem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CovdegError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("hypothesis violated: degree {degree} is below {required}")]
    HypothesisViolated { degree: u64, required: u64 },
    #[error("dimension {n} is not supported; exactness needs n >= 3")]
    UnsupportedDimension { n: u32 },
    #[error("budget of {budget} memo entries exhausted; partial bound {}", partial.value())]
    BudgetExhausted {
        partial: Box<BoundCertificate>,
        budget: usize,
    },
    #[error(transparent)]
    Paulsen(#[from] PaulsenError),
}

/// Optional rules of the bound search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleConfig {
    /// Accept value 2 when `∑d_i = n + r`.
    pub fano_floor: bool,
    /// Use exact values for degrees above the coprime-array threshold.
    pub exactness: bool,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            fano_floor: false,
            exactness: true,
        }
    }
}

fn product_shifted(p: &MultiDegreeProblem, dim: u64) -> Result<BigUint, CovdegError> {
    let mut acc = BigUint::one();
    for &d in p.degrees() {
        if d < dim {
            return Err(CovdegError::HypothesisViolated {
                degree: d,
                required: dim,
            });
        }
        acc *= d - dim + 1;
    }
    Ok(acc)
}

/// `∏(d_i − n + 1)`, valid when every `d_i ≥ n`.
pub fn explicit_lower_bound(p: &MultiDegreeProblem) -> Result<BigUint, CovdegError> {
    product_shifted(p, p.n() as u64)
}

/// `∏(d_i − 2n + 1)`, valid when every `d_i ≥ 2n`. This bounds the degree of
/// every curve on the general complete intersection, not only covering
/// families.
pub fn any_curve_lower_bound(p: &MultiDegreeProblem) -> Result<BigUint, CovdegError> {
    product_shifted(p, 2 * p.n() as u64)
}

/// Least `k ≥ max(6, n)` with `((k − n + 2)/k)^{r+1} ≥ 1/2`, in integers.
pub fn compute_k(n: u32, r: usize) -> u64 {
    let exp = r + 1;
    let holds = |k: u64| {
        let lhs = BigUint::from(2u32) * num_traits::pow(BigUint::from(k + 2 - n as u64), exp);
        lhs >= num_traits::pow(BigUint::from(k), exp)
    };
    let mut k = 6u64.max(n as u64);
    while !holds(k) {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessThreshold {
    pub n: u32,
    pub r: usize,
    pub k: u64,
    pub generators: Vec<GeneratorPair>,
    #[serde(with = "serde_big")]
    pub threshold: BigUint,
}

/// The degree `N(n, r)` above which every degree tuple admits a coprime
/// array, together with the generators that witness it.
pub fn exactness_threshold(n: u32, r: usize) -> Result<ExactnessThreshold, CovdegError> {
    if n < 3 {
        return Err(CovdegError::UnsupportedDimension { n });
    }
    let k = compute_k(n, r);
    let (generators, threshold) = paulsen::generator_pairs(n, &BigUint::from(k), r)?;
    Ok(ExactnessThreshold {
        n,
        r,
        k,
        generators,
        threshold,
    })
}

/// Cheap necessary condition for the coprime-array route: generators exceed
/// `2ⁿ`, so the threshold is at least `4ⁿ`.
pub(crate) fn may_reach_threshold(p: &MultiDegreeProblem) -> bool {
    p.n() >= 3
        && p.r() >= 1
        && 2 * p.n() < 64
        && p.degrees().iter().all(|&d| d >= 1u64 << (2 * p.n()))
}

/// Builds and checks the coprime array for `p` with a precomputed threshold.
pub(crate) fn exact_with(p: &MultiDegreeProblem, threshold: &ExactnessThreshold) -> bool {
    let degrees: Vec<BigUint> = p.degrees().iter().map(|&d| BigUint::from(d)).collect();
    if degrees.iter().any(|d| d < &threshold.threshold) {
        return false;
    }
    paulsen::build_coprime_array_with(
        p.n(),
        &BigUint::from(threshold.k),
        &degrees,
        threshold.generators.clone(),
        threshold.threshold.clone(),
    )
    .is_ok()
}

/// The covering degree where it is known exactly: `n = 1`, `r = 0`, or all
/// degrees at least `N(n, r)` with `n ≥ 3`.
pub fn exact_covdeg(p: &MultiDegreeProblem) -> Option<BigUint> {
    if p.n() == 1 || p.r() == 0 {
        return Some(p.degree_product());
    }
    if !may_reach_threshold(p) {
        return None;
    }
    let threshold = exactness_threshold(p.n(), p.r()).ok()?;
    exact_with(p, &threshold).then(|| p.degree_product())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prob(n: u32, d: &[u64]) -> MultiDegreeProblem {
        MultiDegreeProblem::new(n, d.to_vec()).unwrap()
    }

    #[test]
    fn explicit_examples() {
        assert_eq!(explicit_lower_bound(&prob(2, &[5, 5])).unwrap(), 16u32.into());
        assert_eq!(explicit_lower_bound(&prob(1, &[7])).unwrap(), 7u32.into());
        assert_eq!(explicit_lower_bound(&prob(3, &[3])).unwrap(), 1u32.into());
        assert_eq!(explicit_lower_bound(&prob(3, &[])).unwrap(), 1u32.into());
        assert!(matches!(
            explicit_lower_bound(&prob(3, &[5, 2])),
            Err(CovdegError::HypothesisViolated { degree: 2, required: 3 })
        ));
    }

    #[test]
    fn any_curve_examples() {
        assert_eq!(any_curve_lower_bound(&prob(2, &[6, 7])).unwrap(), 12u32.into());
        assert_eq!(any_curve_lower_bound(&prob(1, &[5])).unwrap(), 4u32.into());
        assert_eq!(any_curve_lower_bound(&prob(3, &[6])).unwrap(), 1u32.into());
        assert!(any_curve_lower_bound(&prob(3, &[5])).is_err());
    }

    #[test]
    fn k_values() {
        assert_eq!(compute_k(2, 1), 6);
        assert_eq!(compute_k(3, 1), 6);
        for n in 2..12u32 {
            for r in 1..5usize {
                let k = compute_k(n, r);
                let ok = |k: u64| {
                    let num = num_traits::pow(BigUint::from(k + 2 - n as u64), r + 1) * 2u32;
                    num >= num_traits::pow(BigUint::from(k), r + 1)
                };
                assert!(ok(k));
                assert!(k == 6u64.max(n as u64) || !ok(k - 1));
            }
        }
    }

    #[test]
    fn threshold_gate() {
        assert_eq!(
            exactness_threshold(2, 1),
            Err(CovdegError::UnsupportedDimension { n: 2 })
        );
        assert_eq!(exact_covdeg(&prob(2, &[4])), None);
        assert_eq!(exact_covdeg(&prob(1, &[3, 4])), Some(12u32.into()));
        assert_eq!(exact_covdeg(&prob(4, &[])), Some(1u32.into()));
    }

    #[test]
    fn threshold_three_one() {
        let t = exactness_threshold(3, 1).unwrap();
        assert_eq!(t.k, 6);
        assert_eq!(t.generators[0].g, 46189u32.into());
        assert_eq!(t.generators[0].g_prime, 765049u32.into());
        let expected = BigUint::from(46188u32) * 765048u32;
        assert_eq!(t.threshold, expected);
        let d = u64::try_from(&expected).unwrap();
        assert_eq!(exact_covdeg(&prob(3, &[d])), Some(d.into()));
        assert_eq!(exact_covdeg(&prob(3, &[d + 12345])), Some((d + 12345).into()));
    }
}
