//! Exact rational helpers for thresholds of the form `(a − b·√c)·n^k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"3"`, `"-0.05"`, `"1e-3"` or `"2/9"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(digits);
    if scale >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

pub fn int(a: u128) -> BigRational {
    BigRational::from_integer(a.into())
}

pub fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn pow_int(n: usize, k: usize) -> BigRational {
    BigRational::from_integer(num_traits::pow(BigInt::from(n), k))
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Whether `a ≤ b − c·√s` holds, for `c ≥ 0` and `s ≥ 0`.
pub fn le_minus_sqrt(a: &BigRational, b: &BigRational, c: &BigRational, s: &BigRational) -> bool {
    let gap = b - a;
    if gap.is_negative() {
        return false;
    }
    c * c * s <= &gap * &gap
}

/// Whether `a ≥ b − c·√s` holds, for `c ≥ 0` and `s ≥ 0`.
pub fn ge_minus_sqrt(a: &BigRational, b: &BigRational, c: &BigRational, s: &BigRational) -> bool {
    let gap = b - a;
    if !gap.is_positive() {
        return true;
    }
    c * c * s >= &gap * &gap
}

/// Whether `a ≤ c·√s`, for `c ≥ 0` and `s ≥ 0`.
pub fn le_sqrt(a: &BigRational, c: &BigRational, s: &BigRational) -> bool {
    !a.is_positive() || a * a <= c * c * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses() {
        assert_eq!(parse_rational("0.05").unwrap(), ratio(1, 20));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("2/9").unwrap(), ratio(2, 9));
        assert_eq!(parse_rational("1e-3").unwrap(), ratio(1, 1000));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("7").unwrap(), ratio(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn sqrt_comparisons() {
        // 2 ≤ 4 − 1·√4 holds with equality
        assert!(le_minus_sqrt(&ratio(2, 1), &ratio(4, 1), &ratio(1, 1), &ratio(4, 1)));
        assert!(!le_minus_sqrt(&ratio(21, 10), &ratio(4, 1), &ratio(1, 1), &ratio(4, 1)));
        assert!(ge_minus_sqrt(&ratio(2, 1), &ratio(4, 1), &ratio(1, 1), &ratio(4, 1)));
        assert!(!ge_minus_sqrt(&ratio(19, 10), &ratio(4, 1), &ratio(1, 1), &ratio(4, 1)));
        assert!(le_sqrt(&ratio(3, 1), &ratio(1, 1), &ratio(9, 1)));
        assert!(!le_sqrt(&ratio(3, 1), &ratio(1, 1), &ratio(8, 1)));
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
