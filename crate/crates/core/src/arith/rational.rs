//! Helpers for arbitrary-precision rationals: the "num/den" text form,
//! conversion to floating point, and continued-fraction rationalization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.4843"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::parse(format!("{text:?}"), "empty rational"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("{text:?}"), "bad numerator"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("{text:?}"), "bad denominator"))?;
        if d.is_zero() {
            return Err(Error::parse(format!("{text:?}"), "zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !whole_digits.chars().all(|c| c.is_ascii_digit())
        {
            return Err(Error::parse(format!("{text:?}"), "bad decimal"));
        }
        let digits = format!("{whole_digits}{frac}");
        let digits = if digits.is_empty() { "0".to_string() } else { digits };
        let mut n: BigInt = digits
            .parse()
            .map_err(|_| Error::parse(format!("{text:?}"), "bad decimal"))?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::parse(format!("{text:?}"), "bad integer"))?;
    Ok(BigRational::from_integer(n))
}

/// Canonical text form, always with an explicit denominator.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact binary value of a finite double.
pub fn from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// accepted only if it lies within `tol` of `x`.
pub fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let mut rest = x.abs();
    // Convergents p_k/q_k.
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let limit = BigInt::from(max_den);
    let mut best: Option<BigRational> = None;
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e18 {
            break;
        }
        let a_int = BigInt::from(a as u64);
        let p2 = &a_int * &p1 + &p0;
        let q2 = &a_int * &q1 + &q0;
        if q2 > limit {
            break;
        }
        let candidate = BigRational::new(p2.clone(), q2.clone());
        let err = (to_f64(&candidate) - x.abs()).abs();
        best = Some(candidate);
        if err <= tol * 0.01 {
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = rest - a;
        if frac < 1e-300 {
            break;
        }
        rest = 1.0 / frac;
    }
    let best = best?;
    let err = (to_f64(&best) - x.abs()).abs();
    if err > tol {
        return None;
    }
    Some(if negative { -best } else { best })
}

/// A random rational `p/q` with `|p| <= max_num` and `1 <= q <= max_den`.
pub fn random_rational<R: rand::Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> BigRational {
    let p = rng.gen_range(-max_num..=max_num);
    let q = rng.gen_range(1..=max_den);
    ratio(p, q)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("0.4843").unwrap(), ratio(4843, 10000));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational(" 4 / -8 ").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn rationals_are_stored_reduced() {
        let q = parse_rational("10/-4").unwrap();
        assert_eq!(format_rational(&q), "-5/2");
    }

    #[test]
    fn rationalize_recovers_small_fractions() {
        assert_eq!(rationalize(0.333333333333, 1_000_000, 1e-9), Some(ratio(1, 3)));
        assert_eq!(rationalize(-2.5, 1_000_000, 1e-12), Some(ratio(-5, 2)));
        assert_eq!(rationalize(3.0, 10, 1e-12), Some(int(3)));
        assert_eq!(rationalize(std::f64::consts::PI, 1_000_000, 1e-13), None);
    }
}
