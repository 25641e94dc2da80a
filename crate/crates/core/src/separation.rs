//! Degree budgets for separating points with adjoint linear series, and the
//! covering-gonality bounds they certify.
//!
//! Every comparison is exact: irrational j-th roots are replaced by dyadic
//! rational brackets (see [`crate::exact`]). A certified `true` uses upper
//! brackets only; a `false` uses lower brackets only; anything in between
//! doubles the precision until a cap is reached.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{self, from_biguint, int, root_lower, root_upper};
use crate::serde_big;

pub const INITIAL_BITS: u32 = 32;
pub const MAX_BITS: u32 = 4096;
pub const SAMPLE_COUNT: usize = 1000;
const SAMPLE_SEED: u64 = 0x5eed_0054;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparationError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("verdict not settled at {bits} bits of precision")]
    PrecisionExhausted { bits: u32 },
    #[error("hypothesis violated: degree d_{index} = {degree} is below {required}")]
    HypothesisViolated {
        index: usize,
        degree: u64,
        required: u64,
    },
}

/// Default uniform perturbation `δ = 10⁻⁶`.
pub fn default_delta() -> BigRational {
    exact::ratio(1, 1_000_000)
}

/// Default perturbation budget `c = 1`.
pub fn default_c() -> BigRational {
    BigRational::one()
}

fn check_epsilon(eps: &BigRational) -> Result<(), SeparationError> {
    if !eps.is_positive() || eps >= &BigRational::one() {
        return Err(SeparationError::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {}",
            exact::format_rational(eps)
        )));
    }
    Ok(())
}

fn check_nonneg(name: &str, value: &BigRational) -> Result<(), SeparationError> {
    if value.is_negative() {
        return Err(SeparationError::InvalidParameter(format!(
            "{name} must be nonnegative, got {}",
            exact::format_rational(value)
        )));
    }
    Ok(())
}

fn check_positive(name: &str, value: &BigRational) -> Result<(), SeparationError> {
    if !value.is_positive() {
        return Err(SeparationError::InvalidParameter(format!(
            "{name} must be positive, got {}",
            exact::format_rational(value)
        )));
    }
    Ok(())
}

/// `∑_{j=1}^{n} j·x^{1/j}` bracketed from above (`upper`) or below.
fn root_sum(x: &BigRational, n: u32, bits: u32, upper: bool) -> BigRational {
    let mut sum = x.clone();
    for j in 2..=n {
        let t = if upper {
            root_upper(x, j, bits)
        } else {
            root_lower(x, j, bits)
        };
        sum += t * int(j);
    }
    sum
}

/// Decides `∑_{j=1}^{n} j·x^{1/j} + offset < d` with escalating precision.
fn settle(x: &BigRational, n: u32, offset: &BigRational, d: &BigRational) -> Result<(bool, u32), SeparationError> {
    let mut bits = INITIAL_BITS;
    loop {
        if root_sum(x, n, bits, true) + offset < *d {
            return Ok((true, bits));
        }
        if root_sum(x, n, bits, false) + offset >= *d {
            return Ok((false, bits));
        }
        if bits >= MAX_BITS {
            return Err(SeparationError::PrecisionExhausted { bits });
        }
        bits *= 2;
    }
}

/// Whether `∑_{j=1}^{n} j·((1−ε)d)^{1/j} + c < d`. For `n = 1` this is the
/// linear inequality `(1−ε)d + c < d`.
pub fn lemma54_inequality_holds(
    n: u32,
    epsilon: &BigRational,
    c: &BigRational,
    d: u64,
) -> Result<bool, SeparationError> {
    check_epsilon(epsilon)?;
    check_nonneg("c", c)?;
    if n == 0 || d == 0 {
        return Err(SeparationError::InvalidParameter("n and d must be positive".into()));
    }
    let d = int(d);
    let x = (BigRational::one() - epsilon) * &d;
    settle(&x, n, c, &d).map(|(holds, _)| holds)
}

/// Sufficient conditions at `d` for the inequality at every `d' ≥ d`:
/// `((ε^{j−1} − ε^j)·d/j)^j > (1−ε)·d` for `2 ≤ j ≤ n`, and `εⁿ·d > c`.
/// Summing `j·((1−ε)d)^{1/j} < (ε^{j−1} − ε^j)·d` telescopes to `(ε − εⁿ)·d`.
pub fn tail_conditions_hold(n: u32, epsilon: &BigRational, c: &BigRational, d: u64) -> bool {
    let d = int(d);
    let one = BigRational::one();
    let rhs = (&one - epsilon) * &d;
    for j in 2..=n {
        let gap = exact::pow(epsilon, j - 1) - exact::pow(epsilon, j);
        let base = gap * &d / int(j);
        if exact::pow(&base, j) <= rhs {
            return false;
        }
    }
    exact::pow(epsilon, n) * &d > *c
}

/// Least `d ≥ 1` satisfying [`tail_conditions_hold`]; the conditions are
/// monotone in `d`.
pub fn tail_threshold(n: u32, epsilon: &BigRational, c: &BigRational) -> u64 {
    let mut hi = 1u64;
    while !tail_conditions_hold(n, epsilon, c, hi) {
        hi = hi.checked_mul(2).expect("tail threshold fits in u64");
    }
    let mut lo = hi / 2;
    // invariant: conditions fail at lo (or lo = 0), hold at hi
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail_conditions_hold(n, epsilon, c, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `ceil(max(c, n/(1−ε)) / εⁿ) + 1`.
pub fn closed_form_threshold(n: u32, epsilon: &BigRational, c: &BigRational) -> u64 {
    let bound = int(n) / (BigRational::one() - epsilon);
    let top = if c > &bound { c.clone() } else { bound };
    let value = exact::ceil_nonneg(&(top / exact::pow(epsilon, n))) + 1u32;
    u64::try_from(&value).expect("closed-form threshold fits in u64")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: u32,
    #[serde(with = "serde_big::rational")]
    pub epsilon: BigRational,
    #[serde(with = "serde_big::rational")]
    pub c: BigRational,
    /// Least `d` such that the inequality holds at every integer from `d`
    /// to `scan_top`, and hence at every `d' ≥ d`.
    pub d0_scan: u64,
    pub d0_closed: u64,
    /// Whether the telescoping conditions already hold at `d0_closed`.
    pub tail_verified: bool,
    /// Least `d` where the telescoping conditions hold.
    pub d_tail: u64,
    /// `max(d0_closed, d_tail)`: the scan covered `[d0_scan, scan_top]`.
    pub scan_top: u64,
    pub samples_checked: usize,
    pub samples_verified: bool,
}

impl ThresholdReport {
    /// The inequality holds for all `d ≥ d0_scan`: checked integer by
    /// integer up to `scan_top`, and by the telescoping conditions beyond.
    pub fn certified(&self) -> bool {
        self.d0_scan <= self.scan_top && self.scan_top >= self.d_tail && self.samples_verified
    }
}

/// Threshold beyond which the inequality always holds, found by scanning
/// downward from a point where the telescoping argument applies.
pub fn lemma54_threshold(
    n: u32,
    epsilon: &BigRational,
    c: &BigRational,
) -> Result<ThresholdReport, SeparationError> {
    check_epsilon(epsilon)?;
    check_nonneg("c", c)?;
    if n == 0 {
        return Err(SeparationError::InvalidParameter("n must be positive".into()));
    }
    let d0_closed = closed_form_threshold(n, epsilon, c);
    let tail_verified = tail_conditions_hold(n, epsilon, c, d0_closed);
    let d_tail = tail_threshold(n, epsilon, c);
    let scan_top = d0_closed.max(d_tail);
    if !lemma54_inequality_holds(n, epsilon, c, scan_top)? {
        return Err(SeparationError::InvalidParameter(format!(
            "inequality fails at {scan_top} despite the telescoping conditions"
        )));
    }
    let mut d0_scan = scan_top;
    while d0_scan > 1 && lemma54_inequality_holds(n, epsilon, c, d0_scan - 1)? {
        d0_scan -= 1;
    }
    let samples = sample_beyond(d0_scan, scan_top, SAMPLE_COUNT);
    let mut samples_verified = true;
    for &d in &samples {
        samples_verified &= lemma54_inequality_holds(n, epsilon, c, d)?;
    }
    Ok(ThresholdReport {
        n,
        epsilon: epsilon.clone(),
        c: c.clone(),
        d0_scan,
        d0_closed,
        tail_verified,
        d_tail,
        scan_top,
        samples_checked: samples.len(),
        samples_verified,
    })
}

/// `count` degrees above `from`, log-uniform up to `2^32 · max(from, top)`,
/// from a fixed seed.
pub fn sample_beyond(from: u64, top: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ from ^ top.rotate_left(17));
    let lo = (from + 1) as f64;
    let hi = (from.max(top) as f64) * 4_294_967_296.0;
    (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            let d = (lo.ln() + u * (hi.ln() - lo.ln())).exp();
            (d as u64).max(from + 1)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationSchedule {
    pub n: u32,
    #[serde(with = "serde_big::rational")]
    pub alpha: BigRational,
    #[serde(with = "serde_big::rational")]
    pub epsilon: BigRational,
    #[serde(with = "serde_big::rational")]
    pub delta: BigRational,
    #[serde(with = "serde_big")]
    pub m: BigUint,
    /// Upper brackets of `j·(m/α)^{1/j} + δ`, `j = 1..n`.
    #[serde(with = "serde_big::rational::vec")]
    pub a: Vec<BigRational>,
    #[serde(with = "serde_big::rational")]
    pub c: BigRational,
    pub d: u64,
    pub feasible: bool,
    /// Root precision the verdict was settled at.
    pub bits: u32,
}

impl SeparationSchedule {
    pub fn total(&self) -> BigRational {
        self.a.iter().fold(self.c.clone(), |acc, a| acc + a)
    }
}

fn schedule_at(x: &BigRational, n: u32, delta: &BigRational, bits: u32) -> Vec<BigRational> {
    (1..=n)
        .map(|j| {
            let t = if j == 1 { x.clone() } else { root_upper(x, j, bits) };
            t * int(j) + delta
        })
        .collect()
}

/// Points separated by `|K + dH|` when subvarieties have degree at least
/// `alpha`: `m = floor((1−ε)·α·d)`, with the degree budget
/// `∑_j (j·(m/α)^{1/j} + δ) + c < d` deciding feasibility.
pub fn separation_count(
    n: u32,
    alpha: &BigRational,
    epsilon: &BigRational,
    d: u64,
    delta: &BigRational,
    c: &BigRational,
) -> Result<SeparationSchedule, SeparationError> {
    check_epsilon(epsilon)?;
    check_positive("alpha", alpha)?;
    check_positive("delta", delta)?;
    check_nonneg("c", c)?;
    if n == 0 || d == 0 {
        return Err(SeparationError::InvalidParameter("n and d must be positive".into()));
    }
    let m = exact::floor_nonneg(&((BigRational::one() - epsilon) * alpha * int(d)));
    let x = from_biguint(&m) / alpha;
    let offset = delta * int(n) + c;
    let (feasible, bits) = match settle(&x, n, &offset, &int(d)) {
        Ok(verdict) => verdict,
        // undecidable at the cap: nothing is certified
        Err(SeparationError::PrecisionExhausted { bits }) => (false, bits),
        Err(e) => return Err(e),
    };
    Ok(SeparationSchedule {
        n,
        alpha: alpha.clone(),
        epsilon: epsilon.clone(),
        delta: delta.clone(),
        m,
        a: schedule_at(&x, n, delta, bits),
        c: c.clone(),
        d,
        feasible,
        bits,
    })
}

/// Certified covering-gonality lower bound `m + 1`, or 0 when the schedule is
/// infeasible.
pub fn gonality_lower_bound(
    n: u32,
    alpha: &BigRational,
    epsilon: &BigRational,
    d: u64,
    delta: &BigRational,
    c: &BigRational,
) -> Result<BigUint, SeparationError> {
    let s = separation_count(n, alpha, epsilon, d, delta, c)?;
    Ok(if s.feasible { s.m + 1u32 } else { BigUint::zero() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GonalityReport {
    #[serde(with = "serde_big")]
    pub bound: BigUint,
    #[serde(with = "serde_big")]
    pub alpha: BigUint,
    /// `bound / ∏d_i`, the constant actually achieved.
    #[serde(with = "serde_big::rational")]
    pub achieved_ratio: BigRational,
    pub schedule: SeparationSchedule,
}

/// Covering-gonality bound for a complete intersection of dimension `n` and
/// type `(d_1, …, d_r)`, viewed as a divisor of degree `d_1` on the
/// `(n+1)`-dimensional complete intersection of type `(d_2, …, d_r)`, where
/// every subvariety has degree at least `α = ∏_{i≥2}(d_i − n)`.
pub fn theorem_b_bound(
    n: u32,
    degrees: &[u64],
    epsilon: &BigRational,
    delta: &BigRational,
    c: &BigRational,
) -> Result<GonalityReport, SeparationError> {
    let Some((&d1, rest)) = degrees.split_first() else {
        return Err(SeparationError::InvalidParameter("at least one degree is required".into()));
    };
    if n == 0 || degrees.contains(&0) {
        return Err(SeparationError::InvalidParameter(
            "dimension and degrees must be positive".into(),
        ));
    }
    let mut alpha = BigUint::one();
    for (i, &d) in rest.iter().enumerate() {
        let required = n as u64 + 1;
        if d < required {
            return Err(SeparationError::HypothesisViolated {
                index: i + 2,
                degree: d,
                required,
            });
        }
        alpha *= d - n as u64;
    }
    let schedule = separation_count(n + 1, &from_biguint(&alpha), epsilon, d1, delta, c)?;
    let bound = if schedule.feasible {
        &schedule.m + 1u32
    } else {
        BigUint::zero()
    };
    let product = degrees.iter().fold(BigUint::one(), |acc, &d| acc * d);
    let achieved_ratio = BigRational::new(
        BigInt::from(bound.clone()),
        BigInt::from(product),
    );
    Ok(GonalityReport {
        bound,
        alpha,
        achieved_ratio,
        schedule,
    })
}
