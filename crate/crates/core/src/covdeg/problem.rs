use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::CovdegError;

/// Canonical instance `cd_{n,r}(d_1, …, d_r)`: dimension, and the degrees
/// sorted descending (the covering degree is symmetric in them).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "ProblemRepr", into = "ProblemRepr")]
pub struct MultiDegreeProblem {
    n: u32,
    degrees: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ProblemRepr {
    n: u32,
    r: usize,
    degrees: Vec<u64>,
}

impl TryFrom<ProblemRepr> for MultiDegreeProblem {
    type Error = CovdegError;

    fn try_from(repr: ProblemRepr) -> Result<Self, Self::Error> {
        if repr.r != repr.degrees.len() {
            return Err(CovdegError::InvalidProblem(format!(
                "codimension {} does not match {} degrees",
                repr.r,
                repr.degrees.len()
            )));
        }
        let problem = MultiDegreeProblem::new(repr.n, repr.degrees.clone())?;
        if problem.degrees != repr.degrees {
            return Err(CovdegError::InvalidProblem(
                "degrees are not sorted descending".into(),
            ));
        }
        Ok(problem)
    }
}

impl From<MultiDegreeProblem> for ProblemRepr {
    fn from(p: MultiDegreeProblem) -> Self {
        ProblemRepr {
            n: p.n,
            r: p.degrees.len(),
            degrees: p.degrees,
        }
    }
}

impl MultiDegreeProblem {
    pub fn new(n: u32, degrees: impl Into<Vec<u64>>) -> Result<Self, CovdegError> {
        let degrees = degrees.into();
        if n == 0 {
            return Err(CovdegError::InvalidProblem("dimension must be at least 1".into()));
        }
        if degrees.contains(&0) {
            return Err(CovdegError::InvalidProblem("degrees must be positive".into()));
        }
        Ok(Self::canonical(n, degrees))
    }

    pub(crate) fn canonical(n: u32, mut degrees: Vec<u64>) -> Self {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        MultiDegreeProblem { n, degrees }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn degree_product(&self) -> BigUint {
        self.degrees
            .iter()
            .fold(BigUint::one(), |acc, &d| acc * d)
    }

    pub fn degree_sum(&self) -> u128 {
        self.degrees.iter().map(|&d| d as u128).sum()
    }

    pub fn contains(&self, degree: u64) -> bool {
        self.degrees.contains(&degree)
    }

    /// Same dimension, one occurrence of `degree` removed.
    pub fn without(&self, degree: u64) -> Option<Self> {
        let pos = self.degrees.iter().position(|&d| d == degree)?;
        let mut degrees = self.degrees.clone();
        degrees.remove(pos);
        Some(MultiDegreeProblem { n: self.n, degrees })
    }

    /// One occurrence of `degree` replaced by `parts`, at dimension `n`.
    pub fn replacing(&self, degree: u64, parts: &[u64], n: u32) -> Option<Self> {
        let pos = self.degrees.iter().position(|&d| d == degree)?;
        let mut degrees = self.degrees.clone();
        degrees.remove(pos);
        degrees.extend_from_slice(parts);
        Some(Self::canonical(n, degrees))
    }
}

impl fmt::Display for MultiDegreeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cd_{{{},{}}}(", self.n, self.degrees.len())?;
        for (i, d) in self.degrees.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}
