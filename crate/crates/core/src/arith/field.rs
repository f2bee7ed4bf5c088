//! Exact arithmetic in ℚ(α) for a configured monic minimal polynomial.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{common_denominator, format_rational, int, to_f64};
use crate::error::{Error, Result};
use crate::numeric::roots;

pub const MAX_EXTENSION_DEGREE: usize = 8;

#[derive(Debug)]
pub struct FieldContext {
    /// Ascending coefficients, monic; `[0, 1]` for ℚ itself.
    minpoly: Vec<BigRational>,
    /// The complex root of the minimal polynomial that α denotes.
    embedding: Complex64,
    alpha_powers: Vec<Complex64>,
    /// False when the degree is above 4 and irreducibility was assumed.
    irreducibility_checked: bool,
}

/// A shared handle to a coefficient field. Two handles are the same field
/// iff their minimal polynomials agree.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldContext>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.minpoly == other.0.minpoly
    }
}

impl Eq for Field {}

impl Field {
    /// The rational numbers.
    pub fn rational() -> Field {
        static QQ: OnceLock<Field> = OnceLock::new();
        QQ.get_or_init(|| {
            Field(Arc::new(FieldContext {
                minpoly: vec![int(0), int(1)],
                embedding: Complex64::new(0.0, 0.0),
                alpha_powers: vec![Complex64::new(1.0, 0.0)],
                irreducibility_checked: true,
            }))
        })
        .clone()
    }

    /// ℚ(α) with α a root of `minpoly` (ascending coefficients). The
    /// polynomial must be monic of degree 2 to 8; for degree at most 4 it
    /// must also be irreducible over ℚ.
    pub fn configure(minpoly: &[BigRational]) -> Result<Field> {
        let mut mp = minpoly.to_vec();
        while mp.last().is_some_and(|c| c.is_zero()) {
            mp.pop();
        }
        let degree = mp.len().saturating_sub(1);
        if degree < 2 {
            return Err(Error::InvalidMinpoly(format!(
                "degree {degree}; an extension needs degree at least 2 (use no field for Q)"
            )));
        }
        if degree > MAX_EXTENSION_DEGREE {
            return Err(Error::InvalidMinpoly(format!(
                "degree {degree} exceeds the cap of {MAX_EXTENSION_DEGREE}"
            )));
        }
        if !mp[degree].is_one() {
            return Err(Error::InvalidMinpoly(format!(
                "leading coefficient {} is not 1",
                format_rational(&mp[degree])
            )));
        }
        let irreducibility_checked = match (degree <= 4).then(|| find_factor(&mp)).flatten() {
            Some(Some(why)) => return Err(Error::ReducibleMinpoly(why)),
            Some(None) => true,
            None => false,
        };
        let numeric: Vec<Complex64> = mp.iter().map(|c| Complex64::new(to_f64(c), 0.0)).collect();
        let rs = roots::roots(&numeric)?;
        let embedding = rs
            .iter()
            .copied()
            .max_by(|a, b| {
                let key = |z: &Complex64| ((z.im * 1e9).round(), (z.re * 1e9).round());
                key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("degree >= 2 has roots");
        let mut alpha_powers = vec![Complex64::new(1.0, 0.0)];
        for i in 1..degree {
            alpha_powers.push(alpha_powers[i - 1] * embedding);
        }
        Ok(Field(Arc::new(FieldContext {
            minpoly: mp,
            embedding,
            alpha_powers,
            irreducibility_checked,
        })))
    }

    /// ℚ(ω) with ω² + ω + 1 = 0, embedded as −1/2 + i√3/2.
    pub fn eisenstein() -> Field {
        Field::configure(&[int(1), int(1), int(1)]).expect("t^2+t+1 is irreducible")
    }

    /// ℚ(i) with i² + 1 = 0, embedded as the upper root.
    pub fn gaussian() -> Field {
        Field::configure(&[int(1), int(0), int(1)]).expect("t^2+1 is irreducible")
    }

    pub fn degree(&self) -> usize {
        self.0.minpoly.len() - 1
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn minpoly(&self) -> &[BigRational] {
        &self.0.minpoly
    }

    pub fn embedding(&self) -> Complex64 {
        self.0.embedding
    }

    pub fn irreducibility_checked(&self) -> bool {
        self.0.irreducibility_checked
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coords: vec![BigRational::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(BigRational::one())
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(int(n))
    }

    pub fn from_rational(&self, q: BigRational) -> FieldElement {
        let mut e = self.zero();
        e.coords[0] = q;
        e
    }

    /// The generator α (for ℚ this is just 0).
    pub fn generator(&self) -> FieldElement {
        let mut e = self.zero();
        if self.degree() > 1 {
            e.coords[1] = BigRational::one();
        }
        e
    }

    /// Element with the given power-basis coordinates; shorter vectors are
    /// zero-padded, longer ones reduced modulo the minimal polynomial.
    pub fn element(&self, coords: Vec<BigRational>) -> FieldElement {
        let mut coords = coords;
        reduce(&mut coords, &self.0.minpoly);
        coords.resize(self.degree(), BigRational::zero());
        FieldElement {
            field: self.clone(),
            coords,
        }
    }

    pub fn describe(&self) -> String {
        if self.is_rational() {
            "Q".to_string()
        } else {
            let terms: Vec<String> = self.0.minpoly.iter().map(format_rational).collect();
            format!("Q[t]/({})", terms.join(","))
        }
    }
}

/// Reduces a polynomial in α, given ascending, modulo the monic `minpoly`.
fn reduce(coords: &mut Vec<BigRational>, minpoly: &[BigRational]) {
    let m = minpoly.len() - 1;
    while coords.len() > m {
        let top = coords.pop().expect("nonempty");
        if top.is_zero() {
            continue;
        }
        let shift = coords.len() - m;
        for (i, c) in minpoly[..m].iter().enumerate() {
            if !c.is_zero() {
                coords[shift + i] -= &top * c;
            }
        }
    }
}

/// Searches for a nontrivial factor of a monic rational polynomial of degree
/// at most 4. The outer `None` means the search was not possible (constant
/// term too large to factor); the inner value describes a factor if found.
fn find_factor(mp: &[BigRational]) -> Option<Option<String>> {
    let degree = mp.len() - 1;
    // u = D t turns D^m p(u/D) into a monic integer polynomial.
    let d = common_denominator(mp.iter());
    let ints: Vec<BigInt> = (0..=degree)
        .map(|i| {
            let scaled = &mp[i] * BigRational::from_integer(num_traits::pow(d.clone(), degree - i));
            scaled.to_integer()
        })
        .collect();
    let rescale = |root: &BigInt| format_rational(&BigRational::new(root.clone(), d.clone()));
    if ints[0].is_zero() {
        return Some(Some("t divides it".to_string()));
    }
    let divisors = integer_divisors(&ints[0])?;
    let eval = |x: &BigInt| {
        ints.iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    };
    for dv in &divisors {
        for cand in [dv.clone(), -dv.clone()] {
            if eval(&cand).is_zero() {
                return Some(Some(format!("rational root {}", rescale(&cand))));
            }
        }
    }
    if degree < 4 {
        return Some(None);
    }
    // (u² + a u + b)(u² + c u + e) with b e = c0.
    let (c0, c1, c2, c3) = (&ints[0], &ints[1], &ints[2], &ints[3]);
    for dv in &divisors {
        for b in [dv.clone(), -dv.clone()] {
            let e = c0 / &b;
            let candidates: Vec<BigInt> = if e != b {
                let num = c1 - c3 * &b;
                let den = &e - &b;
                if (&num % &den).is_zero() {
                    vec![num / den]
                } else {
                    vec![]
                }
            } else if *c1 == c3 * &b {
                // a + c = c3, a c = c2 - 2b.
                let disc = c3 * c3 - BigInt::from(4) * (c2 - BigInt::from(2) * &b);
                if disc.is_negative() {
                    vec![]
                } else {
                    let s = disc.sqrt();
                    if &s * &s == disc && ((c3 + &s) % BigInt::from(2)).is_zero() {
                        vec![(c3 + &s) / BigInt::from(2)]
                    } else {
                        vec![]
                    }
                }
            } else {
                vec![]
            };
            for a in candidates {
                let c = c3 - &a;
                if &a * &c + &b + &e == *c2 && &a * &e + &b * &c == *c1 {
                    return Some(Some(format!(
                        "quadratic factor u^2{:+}u{:+} in u = {}t",
                        a, b, d
                    )));
                }
            }
        }
    }
    Some(None)
}

/// Positive divisors of a nonzero integer, or `None` when it does not fit
/// in 64 bits.
fn integer_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    let mut primes: Vec<(u64, u32)> = Vec::new();
    for p in crate::powermap::factorize(n) {
        match primes.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => primes.push((p, 1)),
        }
    }
    let mut divs: Vec<u64> = vec![1];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = 1u64;
            for _ in 0..=e {
                next.push(d * pk);
                pk = pk.saturating_mul(p);
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    Some(divs.into_iter().map(BigInt::from).collect())
}

#[derive(Clone, Debug)]
pub struct FieldElement {
    field: Field,
    coords: Vec<BigRational>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coords == other.coords
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(&self.coords[0])
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coords
            .iter()
            .zip(&self.field.0.alpha_powers)
            .map(|(c, p)| p * to_f64(c))
            .sum()
    }

    pub fn check_same_field(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.field.describe(),
                right: other.field.describe(),
            })
        }
    }

    fn assert_same_field(&self, other: &FieldElement) {
        if let Err(e) = self.check_same_field(other) {
            panic!("{e}");
        }
    }

    pub fn inverse(&self) -> Option<FieldElement> {
        if self.is_zero() {
            return None;
        }
        if self.field.is_rational() {
            return Some(self.field.from_rational(self.coords[0].recip()));
        }
        let s = qpoly_inverse_mod(&self.coords, &self.field.0.minpoly);
        Some(self.field.element(s))
    }

    pub fn pow(&self, n: u32) -> FieldElement {
        let mut result = self.field.one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        result
    }

    /// Coordinates as `"num/den"` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(format_rational).collect()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = if c.is_integer() {
                c.to_integer().to_string()
            } else {
                format!("{}/{}", c.numer(), c.denom())
            };
            parts.push(match i {
                0 => c,
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{i}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(" + "))
        }
    }
}

// Univariate helpers over ℚ for inversion modulo the minimal polynomial.

fn qtrim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn qmul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    qtrim(&mut out);
    out
}

fn qsub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    qtrim(&mut out);
    out
}

fn qdivrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    qtrim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().expect("nonzero divisor").clone();
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().expect("nonempty") / &lead;
        for (i, y) in b.iter().enumerate() {
            r[shift + i] -= &c * y;
        }
        q[shift] = c;
        r.pop();
        qtrim(&mut r);
    }
    qtrim(&mut q);
    (q, r)
}

/// `a⁻¹ mod m` for `a` coprime to `m` (guaranteed when `m` is irreducible).
fn qpoly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    qtrim(&mut r1);
    let mut s0: Vec<BigRational> = Vec::new();
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while r1.len() > 1 {
        let (q, r) = qdivrem(&r0, &r1);
        let s = qsub(&s0, &qmul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    let c = r1
        .first()
        .cloned()
        .filter(|c| !c.is_zero())
        .expect("element is not invertible: the minimal polynomial is reducible");
    s1.iter().map(|x| x / &c).collect()
}

fn add_impl(a: &FieldElement, b: &FieldElement) -> FieldElement {
    a.assert_same_field(b);
    FieldElement {
        field: a.field.clone(),
        coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
    }
}

fn sub_impl(a: &FieldElement, b: &FieldElement) -> FieldElement {
    a.assert_same_field(b);
    FieldElement {
        field: a.field.clone(),
        coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
    }
}

fn mul_impl(a: &FieldElement, b: &FieldElement) -> FieldElement {
    a.assert_same_field(b);
    let m = a.coords.len();
    if m == 1 {
        return FieldElement {
            field: a.field.clone(),
            coords: vec![&a.coords[0] * &b.coords[0]],
        };
    }
    let mut prod = vec![BigRational::zero(); 2 * m - 1];
    for (i, x) in a.coords.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coords.iter().enumerate() {
            if !y.is_zero() {
                prod[i + j] += x * y;
            }
        }
    }
    reduce(&mut prod, &a.field.0.minpoly);
    FieldElement {
        field: a.field.clone(),
        coords: prod,
    }
}

fn div_impl(a: &FieldElement, b: &FieldElement) -> FieldElement {
    let inv = b.inverse().expect("division by zero in field");
    mul_impl(a, &inv)
}

macro_rules! binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                $imp(self, rhs)
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                $imp(&self, &rhs)
            }
        }
        impl $trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                $imp(&self, rhs)
            }
        }
        impl $trait<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                $imp(self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);
binop!(Div, div, div_impl);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|x| -x).collect(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::ratio;

    #[test]
    fn omega_satisfies_its_relation() {
        let k = Field::eisenstein();
        let w = k.generator();
        let rel = &w * &w + &w + k.one();
        assert!(rel.is_zero());
        let e = k.embedding();
        assert!((e - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-14);
        assert!((w.pow(3).to_complex() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(w.pow(3).is_one());
    }

    #[test]
    fn gaussian_integers() {
        let k = Field::gaussian();
        let i = k.generator();
        assert_eq!(&i * &i, k.from_int(-1));
        let a = k.one() + &i;
        let b = k.one() - &i;
        assert_eq!(&a * &b, k.from_int(2));
        assert_eq!((&a / &b) * &b, a);
    }

    #[test]
    fn rejects_bad_minimal_polynomials() {
        assert!(matches!(
            Field::configure(&[int(0), int(1)]),
            Err(Error::InvalidMinpoly(_))
        ));
        assert!(matches!(
            Field::configure(&[int(1), int(0), int(2)]),
            Err(Error::InvalidMinpoly(_))
        ));
        // t² − 1/4 has the rational root 1/2.
        assert!(matches!(
            Field::configure(&[ratio(-1, 4), int(0), int(1)]),
            Err(Error::ReducibleMinpoly(_))
        ));
        // t⁴ + 4 = (t² + 2t + 2)(t² − 2t + 2).
        assert!(matches!(
            Field::configure(&[int(4), int(0), int(0), int(0), int(1)]),
            Err(Error::ReducibleMinpoly(_))
        ));
        // t⁴ + 2t² + 9 = (t² − 2t + 3)(t² + 2t + 3), no rational roots.
        assert!(Field::configure(&[int(9), int(0), int(2), int(0), int(1)]).is_err());
        // t⁴ + 1 is irreducible over ℚ.
        assert!(Field::configure(&[int(1), int(0), int(0), int(0), int(1)]).is_ok());
        // Degree 5 is accepted on trust.
        let k = Field::configure(&[int(-2), int(0), int(0), int(0), int(0), int(1)]).unwrap();
        assert!(!k.irreducibility_checked());
    }

    #[test]
    fn inverse_in_degree_three() {
        let k = Field::configure(&[int(-2), int(0), int(0), int(1)]).unwrap();
        let a = k.element(vec![int(1), int(2), ratio(-1, 3)]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_one());
    }
}
