//! Periodic points of power maps `z ↦ z^d`.
//!
//! On the unit circle the periodic points of `z^d` are exactly the roots of
//! unity `e^{2πia/b}` with `gcd(b, d) = 1`; off the circle only the fixed
//! points 0 and ∞ are periodic. Two power maps therefore share their periodic
//! points iff their degrees have the same prime divisors.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
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

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard–Brent; `n` must be composite and odd.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut r, mut q) = (2u64, 2u64, 1u64, 1u64, 1u64);
        let mut ys = y;
        let m = 128u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Prime factors of `n` with multiplicity, ascending. `factorize(1)` is empty.
pub fn factorize(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = n;
    if n == 0 {
        return out;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while n.is_multiple_of(p) {
            out.push(p);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            out.push(m);
        } else {
            let f = pollard_brent(m);
            stack.push(f);
            stack.push(m / f);
        }
    }
    out.sort_unstable();
    out
}

fn distinct_primes(n: u64) -> Vec<u64> {
    let mut ps = factorize(n);
    ps.dedup();
    ps
}

/// Product of the distinct primes dividing `d`.
pub fn radical(d: u64) -> Result<u64> {
    if d < 2 {
        return Err(Error::Precondition(format!("radical needs d >= 2, got {d}")));
    }
    Ok(distinct_primes(d).iter().product())
}

/// Whether `z^df` and `z^dg` have the same periodic points.
pub fn same_periodic_points_powermaps(df: u64, dg: u64) -> Result<bool> {
    Ok(radical(df)? == radical(dg)?)
}

/// `e^{2πia/b}` with `0 <= a < b` and `gcd(a, b) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RootOfUnity {
    a: u64,
    b: u64,
}

impl RootOfUnity {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if b == 0 || a >= b || a.gcd(&b) != 1 {
            return Err(Error::Precondition(format!(
                "e^(2 pi i {a}/{b}) is not in reduced form (need 0 <= a < b, gcd(a, b) = 1)"
            )));
        }
        Ok(RootOfUnity { a, b })
    }

    /// Reduces `a/b` modulo 1 to lowest terms.
    pub fn reduced(a: u64, b: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::Precondition("denominator must be positive".into()));
        }
        let a = a % b;
        let g = a.gcd(&b);
        RootOfUnity::new(a / g, b / g)
    }

    pub fn numerator(&self) -> u64 {
        self.a
    }

    pub fn order(&self) -> u64 {
        self.b
    }
}

pub fn is_periodic(z: RootOfUnity, d: u64) -> bool {
    z.b.gcd(&d) == 1
}

/// Period of `z` under `w ↦ w^d`: the multiplicative order of `d` mod `b`.
pub fn period(z: RootOfUnity, d: u64) -> Option<u64> {
    if !is_periodic(z, d) {
        return None;
    }
    Some(multiplicative_order(d, z.b))
}

/// Carmichael's λ(n).
pub fn carmichael(n: u64) -> u64 {
    let ps = factorize(n);
    let mut lambda = 1u64;
    let mut i = 0;
    while i < ps.len() {
        let p = ps[i];
        let mut k = 0u32;
        while i < ps.len() && ps[i] == p {
            k += 1;
            i += 1;
        }
        let term = if p == 2 {
            match k {
                1 => 1,
                2 => 2,
                _ => 1u64 << (k - 2),
            }
        } else {
            (p - 1) * p.pow(k - 1)
        };
        lambda = lambda.lcm(&term);
    }
    lambda
}

/// Order of `d` in `(ℤ/bℤ)^×`; `d` must be a unit mod `b`.
pub fn multiplicative_order(d: u64, b: u64) -> u64 {
    if b == 1 {
        return 1;
    }
    let mut ord = carmichael(b);
    for p in distinct_primes(ord) {
        while ord.is_multiple_of(p) && pow_mod(d, ord / p, b) == 1 {
            ord /= p;
        }
    }
    ord
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerMapReport {
    pub df: u64,
    pub dg: u64,
    pub radical_df: u64,
    pub radical_dg: u64,
    pub same_periodic_points: bool,
    pub points: Vec<PointVerdict>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointVerdict {
    pub a: u64,
    pub b: u64,
    pub periodic_f: bool,
    pub period_f: Option<u64>,
    pub periodic_g: bool,
    pub period_g: Option<u64>,
}

pub fn report(df: u64, dg: u64, points: &[RootOfUnity]) -> Result<PowerMapReport> {
    Ok(PowerMapReport {
        df,
        dg,
        radical_df: radical(df)?,
        radical_dg: radical(dg)?,
        same_periodic_points: same_periodic_points_powermaps(df, dg)?,
        points: points
            .iter()
            .map(|&z| PointVerdict {
                a: z.a,
                b: z.b,
                periodic_f: is_periodic(z, df),
                period_f: period(z, df),
                periodic_g: is_periodic(z, dg),
                period_g: period(z, dg),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_period(a: u64, b: u64, d: u64) -> Option<u64> {
        let mut x = (a * d) % b;
        for n in 1..=b {
            if x == a {
                return Some(n);
            }
            x = (x * d) % b;
        }
        None
    }

    #[test]
    fn radicals() {
        assert_eq!(radical(12).unwrap(), 6);
        assert_eq!(radical(6).unwrap(), 6);
        assert_eq!(radical(97).unwrap(), 97);
        assert_eq!(radical(1 << 40).unwrap(), 2);
        assert!(radical(1).is_err());
    }

    #[test]
    fn factorizes_semiprimes() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        assert_eq!(factorize(p * q), vec![q, p]);
        assert_eq!(factorize(360), vec![2, 2, 2, 3, 3, 5]);
    }

    #[test]
    fn period_matches_brute_force() {
        for d in 2..=12u64 {
            for b in 1..=60u64 {
                for a in 0..b {
                    if a.gcd(&b) != 1 {
                        continue;
                    }
                    let z = RootOfUnity::new(a, b).unwrap();
                    assert_eq!(period(z, d), brute_period(a, b, d), "a={a} b={b} d={d}");
                }
            }
        }
    }

    #[test]
    fn power_map_examples() {
        assert!(same_periodic_points_powermaps(6, 12).unwrap());
        assert!(!same_periodic_points_powermaps(3, 5).unwrap());
        let third = RootOfUnity::new(1, 3).unwrap();
        assert!(!is_periodic(third, 3));
        assert_eq!(period(third, 5), Some(2));
        for k in 1..=10 {
            let z = RootOfUnity::new(1, 1 << k).unwrap();
            assert!(is_periodic(z, 3) && is_periodic(z, 5));
        }
    }
}
