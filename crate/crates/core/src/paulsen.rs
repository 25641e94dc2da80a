//! Paulsen-admissible degrees and the pairwise-coprime degree arrays built
//! from them.
//!
//! A degree `d` is admissible for dimension `n ≥ 3` when it is coprime to
//! `n!` and its largest prime-power divisor `q` satisfies
//!
//! ```text
//! (C(n,2) − 1)·qⁿ + (n! − C(n,2))·qⁿ⁻¹ + (2ⁿ + 1)·n! ≤ d
//! ```
//!
//! Products of runs of consecutive primes above `2ⁿ` eventually satisfy this,
//! which gives arbitrarily long pairwise-coprime sequences of admissible
//! degrees. Two such generators per column, combined through
//! [`coin_represent`], split any large enough degree into admissible entries.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, coin_represent, coin_threshold, ArithError, Factorization};
use crate::serde_big;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PaulsenError {
    #[error("dimension {n} is not supported; admissibility needs n >= 3")]
    UnsupportedDimension { n: u32 },
    #[error("column {column}: degree {degree} has no representation (threshold {threshold})")]
    DegreeTooSmall {
        column: usize,
        degree: BigUint,
        threshold: BigUint,
    },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

fn choose_two(n: u32) -> BigUint {
    BigUint::from(n) * (n - 1) / 2u32
}

/// Left side of the admissibility inequality for prime power `q`.
pub fn admissibility_lhs(n: u32, q: &BigUint) -> BigUint {
    let c2 = choose_two(n);
    let fact = factorial(n);
    let q_pow = num_traits::pow(q.clone(), (n - 1) as usize);
    (&c2 - 1u32) * &q_pow * q + (&fact - &c2) * &q_pow + ((BigUint::one() << n as usize) + 1u32) * fact
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub n: u32,
    #[serde(with = "serde_big")]
    pub d: BigUint,
    #[serde(with = "serde_big")]
    pub q: BigUint,
    #[serde(with = "serde_big")]
    pub lhs: BigUint,
    pub coprime_to_n_factorial: bool,
    pub admissible: bool,
}

pub fn is_admissible(n: u32, d: &BigUint) -> Result<AdmissibilityReport, PaulsenError> {
    if n < 3 {
        return Err(PaulsenError::UnsupportedDimension { n });
    }
    let factorization = arith::factorize(d)?;
    is_admissible_factored(n, &factorization)
}

/// Same as [`is_admissible`] for a degree whose factorization is known.
pub fn is_admissible_factored(
    n: u32,
    factorization: &Factorization,
) -> Result<AdmissibilityReport, PaulsenError> {
    if n < 3 {
        return Err(PaulsenError::UnsupportedDimension { n });
    }
    if factorization.value.is_zero() {
        return Err(ArithError::ZeroArgument.into());
    }
    let q = factorization.largest_prime_power();
    let lhs = admissibility_lhs(n, &q);
    let n_big = BigUint::from(n);
    let coprime_to_n_factorial = factorization.primes().all(|p| *p > n_big);
    let admissible = coprime_to_n_factorial && lhs <= factorization.value;
    Ok(AdmissibilityReport {
        n,
        d: factorization.value.clone(),
        q,
        lhs,
        coprime_to_n_factorial,
        admissible,
    })
}

/// An admissible degree together with its (squarefree) factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnElement {
    #[serde(with = "serde_big")]
    pub value: BigUint,
    pub factorization: Factorization,
}

/// Product of the shortest run of consecutive primes above `2ⁿ`, skipping
/// `forbidden`, that is admissible and at least `floor`.
pub fn build_sn_element(
    n: u32,
    floor: &BigUint,
    forbidden: &BTreeSet<BigUint>,
) -> Result<SnElement, PaulsenError> {
    if n < 3 {
        return Err(PaulsenError::UnsupportedDimension { n });
    }
    let mut prime = BigUint::one() << n as usize;
    let mut run: Vec<BigUint> = Vec::new();
    loop {
        prime = arith::next_prime_above(&prime);
        if forbidden.contains(&prime) {
            continue;
        }
        run.push(prime.clone());
        let factorization = Factorization::from_primes(run.iter().cloned());
        if factorization.value < *floor {
            continue;
        }
        if is_admissible_factored(n, &factorization)?.admissible {
            return Ok(SnElement {
                value: factorization.value.clone(),
                factorization,
            });
        }
    }
}

/// `count` pairwise-coprime admissible degrees, each at least `floor`. Each
/// element starts its prime run after the primes used by the previous ones.
pub fn coprime_sequence_in_sn(
    n: u32,
    count: usize,
    floor: &BigUint,
) -> Result<Vec<SnElement>, PaulsenError> {
    if n < 3 {
        return Err(PaulsenError::UnsupportedDimension { n });
    }
    let mut forbidden = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let element = build_sn_element(n, floor, &forbidden)?;
        forbidden.extend(element.factorization.primes().cloned());
        out.push(element);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorPair {
    #[serde(with = "serde_big")]
    pub g: BigUint,
    #[serde(with = "serde_big")]
    pub g_prime: BigUint,
}

impl GeneratorPair {
    pub fn threshold(&self) -> BigUint {
        coin_threshold(&self.g, &self.g_prime)
    }
}

/// `count` copies of `value` in one column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnEntry {
    #[serde(with = "serde_big")]
    pub value: BigUint,
    #[serde(with = "serde_big")]
    pub count: BigUint,
}

/// Array `{a_j^i}` whose column `j` sums to `d_j`. Columns are stored
/// run-length encoded since they can hold billions of entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoprimeArrayCertificate {
    pub n: u32,
    #[serde(with = "serde_big")]
    pub k: BigUint,
    pub r: usize,
    #[serde(with = "serde_big::vec")]
    pub degrees: Vec<BigUint>,
    pub columns: Vec<Vec<ColumnEntry>>,
    pub generators: Vec<GeneratorPair>,
    #[serde(with = "serde_big")]
    pub threshold: BigUint,
}

/// Generator pairs for `r` columns and the threshold `N = max_j (g_j−1)(g_j′−1)`.
///
/// From a coprime sequence `s_1..s_2r`, column `j` uses `(s_j, s_{r+j})`.
pub fn generator_pairs(
    n: u32,
    k: &BigUint,
    r: usize,
) -> Result<(Vec<GeneratorPair>, BigUint), PaulsenError> {
    let sequence = coprime_sequence_in_sn(n, 2 * r, k)?;
    let pairs: Vec<GeneratorPair> = (0..r)
        .map(|j| GeneratorPair {
            g: sequence[j].value.clone(),
            g_prime: sequence[r + j].value.clone(),
        })
        .collect();
    let threshold = pairs
        .iter()
        .map(GeneratorPair::threshold)
        .max()
        .unwrap_or_else(BigUint::zero);
    Ok((pairs, threshold))
}

pub fn build_coprime_array(
    n: u32,
    k: &BigUint,
    degrees: &[BigUint],
) -> Result<CoprimeArrayCertificate, PaulsenError> {
    let (generators, threshold) = generator_pairs(n, k, degrees.len())?;
    build_coprime_array_with(n, k, degrees, generators, threshold)
}

/// Variant of [`build_coprime_array`] reusing precomputed generators.
pub fn build_coprime_array_with(
    n: u32,
    k: &BigUint,
    degrees: &[BigUint],
    generators: Vec<GeneratorPair>,
    threshold: BigUint,
) -> Result<CoprimeArrayCertificate, PaulsenError> {
    if n < 3 {
        return Err(PaulsenError::UnsupportedDimension { n });
    }
    assert_eq!(generators.len(), degrees.len());
    let mut columns = Vec::with_capacity(degrees.len());
    for (j, (degree, pair)) in degrees.iter().zip(&generators).enumerate() {
        let rep = match coin_represent(&pair.g, &pair.g_prime, degree) {
            Ok(rep) => rep,
            Err(ArithError::NotRepresentable { .. }) | Err(ArithError::ZeroArgument) => {
                return Err(PaulsenError::DegreeTooSmall {
                    column: j,
                    degree: degree.clone(),
                    threshold: threshold.clone(),
                })
            }
            Err(e) => return Err(e.into()),
        };
        let mut column = Vec::new();
        if !rep.x.is_zero() {
            column.push(ColumnEntry {
                value: pair.g.clone(),
                count: rep.x,
            });
        }
        if !rep.y.is_zero() {
            column.push(ColumnEntry {
                value: pair.g_prime.clone(),
                count: rep.y,
            });
        }
        columns.push(column);
    }
    let cert = CoprimeArrayCertificate {
        n,
        k: k.clone(),
        r: degrees.len(),
        degrees: degrees.to_vec(),
        columns,
        generators,
        threshold,
    };
    if let Err(violation) = check_coprime_array(&cert) {
        panic!("constructed coprime array fails its own check: {violation}");
    }
    Ok(cert)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrayViolation {
    #[error("expected {expected} columns, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("column {column} is empty or has a zero multiplicity")]
    EmptyEntry { column: usize },
    #[error("column {column} sums to {sum}, expected {degree}")]
    Sum {
        column: usize,
        sum: BigUint,
        degree: BigUint,
    },
    #[error("entry {value} in column {column} is below the floor {k}")]
    BelowFloor {
        column: usize,
        value: BigUint,
        k: BigUint,
    },
    #[error("entries {a} (column {col_a}) and {b} (column {col_b}) share a factor")]
    NotCoprime {
        col_a: usize,
        a: BigUint,
        col_b: usize,
        b: BigUint,
    },
    #[error("entry {value} in column {column} is not admissible for n = {n}")]
    NotAdmissible { column: usize, value: BigUint, n: u32 },
    #[error("could not evaluate admissibility of {value}: {reason}")]
    Unverifiable { value: BigUint, reason: String },
}

/// Re-verifies every property of an array from its entries alone: column
/// sums, the entry floor, cross-column coprimality and admissibility (with a
/// fresh factorization of each entry).
pub fn check_coprime_array(cert: &CoprimeArrayCertificate) -> Result<(), ArrayViolation> {
    if cert.columns.len() != cert.degrees.len() || cert.r != cert.degrees.len() {
        return Err(ArrayViolation::Shape {
            expected: cert.r,
            found: cert.columns.len(),
        });
    }
    for (j, (column, degree)) in cert.columns.iter().zip(&cert.degrees).enumerate() {
        if column.is_empty() || column.iter().any(|e| e.count.is_zero()) {
            return Err(ArrayViolation::EmptyEntry { column: j });
        }
        let sum = column
            .iter()
            .fold(BigUint::zero(), |acc, e| acc + &e.value * &e.count);
        if &sum != degree {
            return Err(ArrayViolation::Sum {
                column: j,
                sum,
                degree: degree.clone(),
            });
        }
        for entry in column {
            if entry.value < cert.k {
                return Err(ArrayViolation::BelowFloor {
                    column: j,
                    value: entry.value.clone(),
                    k: cert.k.clone(),
                });
            }
            let report = is_admissible(cert.n, &entry.value).map_err(|e| ArrayViolation::Unverifiable {
                value: entry.value.clone(),
                reason: e.to_string(),
            })?;
            if !report.admissible {
                return Err(ArrayViolation::NotAdmissible {
                    column: j,
                    value: entry.value.clone(),
                    n: cert.n,
                });
            }
        }
    }
    for (ja, col_a) in cert.columns.iter().enumerate() {
        for (jb, col_b) in cert.columns.iter().enumerate().skip(ja + 1) {
            for a in col_a {
                for b in col_b {
                    if !a.value.gcd(&b.value).is_one() {
                        return Err(ArrayViolation::NotCoprime {
                            col_a: ja,
                            a: a.value.clone(),
                            col_b: jb,
                            b: b.value.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}
