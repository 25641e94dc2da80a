//! Exact rational helpers: parsing `p/q` strings and outward-rounded
//! dyadic j-th roots.
//!
//! Roots are bracketed on the grid `k / 2^bits`: [`root_upper`] returns the
//! smallest grid point `t` with `t^j ≥ x` and [`root_lower`] the largest with
//! `t^j ≤ x`. Both are exact (integer j-th roots), so comparisons built on
//! them never involve floating point.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| format!("bad numerator in {text:?}"))?;
    let den = BigInt::from_str(den).map_err(|_| format!("bad denominator in {text:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(BigRational::new(num, den))
}

pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(value.into())
}

pub fn from_biguint(value: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(value.clone()))
}

/// Floor of a nonnegative rational.
pub fn floor_nonneg(value: &BigRational) -> BigUint {
    assert!(!value.is_negative());
    value
        .floor()
        .to_integer()
        .to_biguint()
        .expect("nonnegative")
}

/// Ceiling of a nonnegative rational.
pub fn ceil_nonneg(value: &BigRational) -> BigUint {
    assert!(!value.is_negative());
    value.ceil().to_integer().to_biguint().expect("nonnegative")
}

fn ceil_root(m: &BigUint, j: u32) -> BigUint {
    let s = m.nth_root(j);
    if num_traits::pow(s.clone(), j as usize) < *m {
        s + 1u32
    } else {
        s
    }
}

fn scaled(x: &BigRational, j: u32, bits: u32) -> (BigUint, BigUint) {
    assert!(!x.is_negative(), "root of a negative rational");
    assert!(j >= 1);
    let numer = x.numer().magnitude() << (bits as usize * j as usize);
    let denom = x.denom().magnitude().clone();
    numer.div_rem(&denom)
}

fn dyadic(k: BigUint, bits: u32) -> BigRational {
    BigRational::new(
        BigInt::from_biguint(Sign::Plus, k),
        BigInt::one() << bits as usize,
    )
}

/// Smallest `t = k/2^bits` with `t^j ≥ x`.
pub fn root_upper(x: &BigRational, j: u32, bits: u32) -> BigRational {
    let (quot, rem) = scaled(x, j, bits);
    let target = if rem.is_zero() { quot } else { quot + 1u32 };
    dyadic(ceil_root(&target, j), bits)
}

/// Largest `t = k/2^bits` with `t^j ≤ x`.
pub fn root_lower(x: &BigRational, j: u32, bits: u32) -> BigRational {
    let (quot, _) = scaled(x, j, bits);
    dyadic(quot.nth_root(j), bits)
}

pub fn pow(x: &BigRational, j: u32) -> BigRational {
    num_traits::pow(x.clone(), j as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational(" 6/8 ").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert_eq!(parse_rational("-1/2").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert_eq!(format_rational(&ratio(6, 8)), "3/4");
        assert_eq!(format_rational(&int(7)), "7");
    }

    #[test]
    fn exact_roots_are_tight() {
        let x = int(81);
        assert_eq!(root_upper(&x, 2, 8), int(9));
        assert_eq!(root_lower(&x, 2, 8), int(9));
        assert_eq!(root_upper(&x, 4, 3), int(3));
        assert_eq!(root_upper(&ratio(1, 4), 2, 4), ratio(1, 2));
    }

    #[test]
    fn sqrt_six_bracket() {
        let x = int(6);
        let up = root_upper(&x, 2, 20);
        let lo = root_lower(&x, 2, 20);
        assert!(pow(&up, 2) >= x);
        assert!(pow(&lo, 2) <= x);
        assert!(&up - &lo <= ratio(1, 1 << 20));
    }

    proptest! {
        #[test]
        fn roots_bracket(num in 0i64..1_000_000, den in 1i64..10_000, j in 1u32..6, bits in 0u32..40) {
            let x = ratio(num, den);
            let up = root_upper(&x, j, bits);
            let lo = root_lower(&x, j, bits);
            let step = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
            prop_assert!(pow(&up, j) >= x);
            prop_assert!(pow(&lo, j) <= x);
            prop_assert!(lo <= up);
            prop_assert!(&up - &lo <= step);
            // tightness: one grid step below the upper bound is too small
            let below = &up - &step;
            prop_assert!(below.is_negative() || pow(&below, j) < x);
        }
    }
}
