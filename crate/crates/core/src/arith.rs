//! Exact integer number theory used by the bound engine: primality,
//! factorization, prime powers, two-generator coin representations and
//! prime runs.
//!
//! Everything is arbitrary precision. Primality is deterministic below
//! 2^64 (Miller-Rabin with a fixed witness set that is known to be exact in
//! that range); above it a fixed-seed randomized Miller-Rabin is used and the
//! answer is reported as [`Primality::ProbablePrime`].

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::serde_big;

/// Trial division bound used before switching to Pollard rho.
pub const TRIAL_DIVISION_LIMIT: u32 = 1_000_000;

const MR_WITNESSES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const MR_RANDOM_ROUNDS: usize = 32;
const MR_SEED: u64 = 0x6b43_a9b5_c0ff_ee11;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("argument must be a positive integer")]
    ZeroArgument,
    #[error("factoring budget exhausted; unsplit cofactor {cofactor}")]
    FactorBudgetExhausted { cofactor: BigUint },
    #[error("{g} and {g_prime} are not coprime")]
    NotCoprime { g: BigUint, g_prime: BigUint },
    #[error("{target} is not a nonnegative combination of {g} and {g_prime}")]
    NotRepresentable {
        g: BigUint,
        g_prime: BigUint,
        target: BigUint,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Primality {
    Composite,
    Prime,
    /// Passed every round of the randomized test; only produced above 2^64.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "serde_big")]
    pub prime: BigUint,
    pub exponent: u32,
}

impl PrimePower {
    pub fn value(&self) -> BigUint {
        num_traits::pow(self.prime.clone(), self.exponent as usize)
    }
}

/// Complete prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    #[serde(with = "serde_big")]
    pub value: BigUint,
    /// Sorted by prime, strictly increasing.
    pub factors: Vec<PrimePower>,
    /// Set when some factor above 2^64 is only a probable prime.
    #[serde(default)]
    pub probable: bool,
}

impl Factorization {
    /// Builds a factorization from primes already known to the caller. The
    /// primes are re-tested and merged; the value is their product.
    pub fn from_primes<I>(primes: I) -> Factorization
    where
        I: IntoIterator<Item = BigUint>,
    {
        let mut primes: Vec<BigUint> = primes.into_iter().collect();
        primes.sort();
        let mut factors: Vec<PrimePower> = Vec::new();
        let mut probable = false;
        for p in primes {
            match factors.last_mut() {
                Some(last) if last.prime == p => last.exponent += 1,
                _ => {
                    let verdict = primality(&p);
                    assert!(verdict.is_prime(), "{p} is not prime");
                    probable |= verdict == Primality::ProbablePrime;
                    factors.push(PrimePower {
                        prime: p,
                        exponent: 1,
                    });
                }
            }
        }
        let value = factors
            .iter()
            .fold(BigUint::one(), |acc, pp| acc * pp.value());
        Factorization {
            value,
            factors,
            probable,
        }
    }

    pub fn reassemble(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, pp| acc * pp.value())
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|pp| &pp.prime)
    }

    pub fn largest_prime_power(&self) -> BigUint {
        self.factors
            .iter()
            .map(PrimePower::value)
            .max()
            .unwrap_or_else(BigUint::one)
    }

    /// Structural invariants: sorted distinct primes, positive exponents,
    /// product equals value.
    pub fn is_consistent(&self) -> bool {
        let sorted = self.factors.windows(2).all(|w| w[0].prime < w[1].prime);
        let positive = self.factors.iter().all(|pp| pp.exponent >= 1);
        let primes = self.factors.iter().all(|pp| primality(&pp.prime).is_prime());
        sorted && positive && primes && self.reassemble() == self.value
    }
}

/// Iteration budget for the Pollard rho stage of [`factorize_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            rho_iterations: 1 << 24,
        }
    }
}

/// All primes below [`TRIAL_DIVISION_LIMIT`], computed once.
pub fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_below(TRIAL_DIVISION_LIMIT))
}

/// Sieve of Eratosthenes.
pub fn primes_below(limit: u32) -> Vec<u32> {
    let limit = limit as usize;
    if limit < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; limit];
    let mut primes = Vec::new();
    for i in 2..limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u32);
        let mut j = i * i;
        while j < limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn is_prime_u64(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    for &p in &MR_WITNESSES_U64 {
        if m.is_multiple_of(p) {
            return m == p;
        }
    }
    let s = (m - 1).trailing_zeros();
    let d = (m - 1) >> s;
    'witness: for &a in &MR_WITNESSES_U64 {
        let mut x = pow_mod(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn miller_rabin_round(m: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let one = BigUint::one();
    let m_minus_one = m - &one;
    let mut x = a.modpow(d, m);
    if x == one || x == m_minus_one {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % m;
        if x == m_minus_one {
            return true;
        }
    }
    false
}

pub fn primality(m: &BigUint) -> Primality {
    if let Some(small) = m.to_u64() {
        return if is_prime_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    for &p in &small_primes()[..64] {
        if (m % p).is_zero() {
            return Primality::Composite;
        }
    }
    let m_minus_one = m - 1u32;
    let s = m_minus_one.trailing_zeros().expect("m > 1");
    let d = &m_minus_one >> s;
    for &a in &MR_WITNESSES_U64 {
        if !miller_rabin_round(m, &d, s, &BigUint::from(a)) {
            return Primality::Composite;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(MR_SEED);
    let span = m - 3u32;
    for _ in 0..MR_RANDOM_ROUNDS {
        let a = BigUint::from(rng.random::<u64>()) % &span + 2u32;
        if !miller_rabin_round(m, &d, s, &a) {
            return Primality::Composite;
        }
    }
    Primality::ProbablePrime
}

pub fn is_prime(m: &BigUint) -> bool {
    primality(m).is_prime()
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor of the odd
/// composite `n`, or `None` once `budget` iterations are spent.
fn pollard_brent(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    const BATCH: u64 = 128;
    let one = BigUint::one();
    let mut increment = 1u32;
    while *budget > 0 {
        let c = BigUint::from(increment);
        let step = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut run = 1u64;
        while g == one {
            x = y.clone();
            for _ in 0..run {
                y = step(&y);
            }
            let mut k = 0;
            while k < run && g == one {
                ys = y.clone();
                let steps = BATCH.min(run - k);
                for _ in 0..steps {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                *budget = budget.saturating_sub(steps);
                g = q.gcd(n);
                k += steps;
                if *budget == 0 && g == one {
                    return None;
                }
            }
            run *= 2;
        }
        if &g == n {
            // batch overshot; replay one step at a time
            loop {
                ys = step(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
        increment += 1;
    }
    None
}

pub fn factorize(m: &BigUint) -> Result<Factorization, ArithError> {
    factorize_with(m, FactorBudget::default())
}

/// Trial division up to [`TRIAL_DIVISION_LIMIT`], then Pollard rho on the
/// remaining cofactor within `budget`.
pub fn factorize_with(m: &BigUint, budget: FactorBudget) -> Result<Factorization, ArithError> {
    if m.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    let mut primes: Vec<BigUint> = Vec::new();
    let mut rest = m.clone();
    for &p in small_primes() {
        let p_big = BigUint::from(p);
        if &p_big * &p_big > rest {
            break;
        }
        while (&rest % p).is_zero() {
            rest /= p;
            primes.push(p_big.clone());
        }
    }
    if !rest.is_one() {
        let limit = BigUint::from(TRIAL_DIVISION_LIMIT);
        if rest < &limit * &limit {
            // no divisor up to the trial bound, hence prime
            primes.push(rest);
        } else {
            let mut remaining = budget.rho_iterations;
            let mut stack = vec![rest];
            while let Some(c) = stack.pop() {
                if is_prime(&c) {
                    primes.push(c);
                    continue;
                }
                match pollard_brent(&c, &mut remaining) {
                    Some(f) => {
                        let other = &c / &f;
                        stack.push(f);
                        stack.push(other);
                    }
                    None => return Err(ArithError::FactorBudgetExhausted { cofactor: c }),
                }
            }
        }
    }
    Ok(Factorization::from_primes(primes))
}

pub fn largest_prime_power_divisor(m: &BigUint) -> Result<BigUint, ArithError> {
    Ok(factorize(m)?.largest_prime_power())
}

/// A representation `g·x + g′·y = target` with nonnegative `x`, `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinRepresentation {
    #[serde(with = "serde_big")]
    pub g: BigUint,
    #[serde(with = "serde_big")]
    pub g_prime: BigUint,
    #[serde(with = "serde_big")]
    pub target: BigUint,
    #[serde(with = "serde_big")]
    pub x: BigUint,
    #[serde(with = "serde_big")]
    pub y: BigUint,
}

impl CoinRepresentation {
    pub fn holds(&self) -> bool {
        &self.g * &self.x + &self.g_prime * &self.y == self.target
    }
}

/// Frobenius bound `(g−1)(g′−1)`: every integer at or above it is
/// representable by coprime `g`, `g′`.
pub fn coin_threshold(g: &BigUint, g_prime: &BigUint) -> BigUint {
    (g - 1u32) * (g_prime - 1u32)
}

fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a.clone());
    let m_signed = BigInt::from(m.clone());
    let egcd = a.extended_gcd(&m_signed);
    if !egcd.gcd.is_one() {
        return None;
    }
    egcd.x.mod_floor(&m_signed).to_biguint()
}

/// Nonnegative solution of `g·x + g′·y = target` with the smallest `y`.
///
/// Every solution has `y ≡ target·g′⁻¹ (mod g)`, so the least residue is the
/// minimal `y`; if it leaves a negative `x`, nothing else can work.
pub fn coin_represent(
    g: &BigUint,
    g_prime: &BigUint,
    target: &BigUint,
) -> Result<CoinRepresentation, ArithError> {
    if g.is_zero() || g_prime.is_zero() || target.is_zero() {
        return Err(ArithError::ZeroArgument);
    }
    if !g.gcd(g_prime).is_one() {
        return Err(ArithError::NotCoprime {
            g: g.clone(),
            g_prime: g_prime.clone(),
        });
    }
    let y = if g.is_one() {
        BigUint::zero()
    } else {
        let inv = mod_inverse(&(g_prime % g), g).expect("coprime generators");
        (target % g) * inv % g
    };
    let used = g_prime * &y;
    if &used > target {
        return Err(ArithError::NotRepresentable {
            g: g.clone(),
            g_prime: g_prime.clone(),
            target: target.clone(),
        });
    }
    let x = (target - used) / g;
    Ok(CoinRepresentation {
        g: g.clone(),
        g_prime: g_prime.clone(),
        target: target.clone(),
        x,
        y,
    })
}

/// Smallest prime strictly greater than `x`.
pub fn next_prime_above(x: &BigUint) -> BigUint {
    let mut candidate = x + 1u32;
    if candidate <= BigUint::from(2u32) {
        return BigUint::from(2u32);
    }
    if candidate.is_even() {
        candidate += 1u32;
    }
    while !is_prime(&candidate) {
        candidate += 2u32;
    }
    // Bertrand's postulate
    assert!(
        x.is_zero() || candidate <= x * 2u32,
        "prime gap above {x} contradicts Bertrand's postulate"
    );
    candidate
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn pairs(f: &Factorization) -> Vec<(u64, u32)> {
        f.factors
            .iter()
            .map(|pp| (pp.prime.to_u64().unwrap(), pp.exponent))
            .collect()
    }

    #[test]
    fn primality_small_cases() {
        assert!(!is_prime(&big(0)));
        assert!(!is_prime(&big(1)));
        assert!(is_prime(&big(2)));
        assert!(!is_prime(&big(46189)));
        assert!(is_prime(&big(1_000_003)));
        // strong pseudoprime to bases 2, 3, 5, 7
        assert!(!is_prime(&big(3_215_031_751)));
        assert!(is_prime(&big(18_446_744_073_709_551_557)));
    }

    #[test]
    fn primality_matches_sieve() {
        let sieve = primes_below(20_000);
        let from_test: Vec<u32> = (0..20_000u32).filter(|&m| is_prime(&big(m as u64))).collect();
        assert_eq!(sieve, from_test);
    }

    #[test]
    fn large_primes_are_probable() {
        // 2^89 - 1 is a Mersenne prime
        let m = (BigUint::one() << 89usize) - 1u32;
        assert_eq!(primality(&m), Primality::ProbablePrime);
        let composite = &m * big(1_000_003);
        assert_eq!(primality(&composite), Primality::Composite);
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(pairs(&factorize(&big(12)).unwrap()), vec![(2, 2), (3, 1)]);
        assert_eq!(
            pairs(&factorize(&big(5005)).unwrap()),
            vec![(5, 1), (7, 1), (11, 1), (13, 1)]
        );
        assert!(factorize(&big(1)).unwrap().factors.is_empty());
        assert_eq!(factorize(&big(0)), Err(ArithError::ZeroArgument));
    }

    #[test]
    fn factorize_needs_rho() {
        let p = big(1_000_003);
        let q = big(1_000_033);
        let r = big(999_999_937);
        let m = &p * &q * &r * &p;
        let f = factorize(&m).unwrap();
        assert_eq!(
            pairs(&f),
            vec![(1_000_003, 2), (1_000_033, 1), (999_999_937, 1)]
        );
        assert!(f.is_consistent());
    }

    #[test]
    fn factorize_budget_exhaustion() {
        let m = big(1_000_003) * big(1_000_033);
        let err = factorize_with(&m, FactorBudget { rho_iterations: 1 }).unwrap_err();
        assert!(matches!(err, ArithError::FactorBudgetExhausted { .. }));
    }

    #[test]
    fn largest_prime_power_examples() {
        assert_eq!(largest_prime_power_divisor(&big(12)).unwrap(), big(4));
        assert_eq!(largest_prime_power_divisor(&big(5005)).unwrap(), big(13));
        assert_eq!(largest_prime_power_divisor(&big(1)).unwrap(), big(1));
    }

    #[test]
    fn coin_examples() {
        let r = coin_represent(&big(2), &big(3), &big(7)).unwrap();
        assert_eq!((r.x, r.y), (big(2), big(1)));
        let r = coin_represent(&big(5), &big(7), &big(24)).unwrap();
        assert_eq!((r.x, r.y), (big(2), big(2)));
        assert!(matches!(
            coin_represent(&big(5), &big(7), &big(23)),
            Err(ArithError::NotRepresentable { .. })
        ));
        assert!(matches!(
            coin_represent(&big(2), &big(3), &big(1)),
            Err(ArithError::NotRepresentable { .. })
        ));
        assert!(matches!(
            coin_represent(&big(4), &big(6), &big(100)),
            Err(ArithError::NotCoprime { .. })
        ));
        let r = coin_represent(&big(1), &big(9), &big(5)).unwrap();
        assert_eq!((r.x, r.y), (big(5), big(0)));
    }

    #[test]
    fn next_prime_examples() {
        assert_eq!(next_prime_above(&big(8)), big(11));
        assert_eq!(next_prime_above(&big(2)), big(3));
        assert_eq!(next_prime_above(&big(13)), big(17));
        assert_eq!(next_prime_above(&big(1)), big(2));
    }
}
