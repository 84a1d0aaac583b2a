//! Exact rational scalars and the small helpers every other module leans on.
//!
//! `Rational` is `num_rational::BigRational`, which keeps values in lowest
//! terms with a positive denominator, so structural equality is value equality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

pub type Rational = num_rational::BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `x^e` for any integer `e`. Panics on `0^e` with `e < 0`.
pub fn pow(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        assert!(!x.is_zero(), "zero raised to a negative power");
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn binomial_q(n: u64, k: u64) -> Rational {
    Rational::from_integer(binomial(n, k))
}

pub fn factorial_q(n: u64) -> Rational {
    Rational::from_integer(factorial(n))
}

/// `(-1)^k` as a rational.
pub fn sign_pow(k: i64) -> Rational {
    if k.rem_euclid(2) == 0 {
        one()
    } else {
        -one()
    }
}

/// Lowest-terms `"num/den"`, or just `"num"` for integers.
pub fn fmt(x: &Rational) -> String {
    x.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational from {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"0.25"`.
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n = BigInt::from_str(&digits).map_err(|_| err())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Rational::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    BigInt::from_str(t).map(Rational::from_integer).map_err(|_| err())
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division when numerator or denominator overflow f64.
        let bits = x.numer().bits().max(x.denom().bits()) as i64;
        let shift = (bits - 900).max(0) as usize;
        let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact square root when `x` is the square of a rational.
pub fn sqrt_exact(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn is_integer(x: &Rational) -> bool {
    x.is_integer()
}

/// Integer value of `x`, if it is one and fits in `i64`.
pub fn to_i64(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

/// Rounds a rational to a nearby one with denominator `2^bits`, bounding
/// the size of long numeric accumulations.
pub fn round_to_bits(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = x * Rational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_mod_floor(scaled.denom());
    let twice = r * 2;
    let n = if &twice >= scaled.denom() { q + 1 } else { q };
    Rational::new(n, scale)
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse("-1.5").unwrap(), rat(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn formatting_is_lowest_terms() {
        assert_eq!(fmt(&rat(-2, 48)), "-1/24");
        assert_eq!(fmt(&rat(4, 2)), "2");
        assert_eq!(fmt(&zero()), "0");
    }

    #[test]
    fn powers_and_roots() {
        assert_eq!(pow(&rat(2, 3), -2), rat(9, 4));
        assert_eq!(pow(&rat(2, 3), 0), one());
        assert_eq!(sqrt_exact(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(sqrt_exact(&rat(2, 1)), None);
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn rounding_is_close() {
        let x = rat(1, 3);
        let r = round_to_bits(&x, 60);
        assert!(abs(&(r - x)) <= rat(1, 1 << 60));
    }
}
