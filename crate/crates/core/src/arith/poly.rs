//! Dense univariate polynomials over a coefficient field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::field::{Field, FieldElement};
use crate::error::{Error, Result};

/// Ascending coefficients; the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn zero(field: &Field) -> Poly {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field.one())
    }

    pub fn constant(c: FieldElement) -> Poly {
        Poly::new(c.field().clone(), vec![c])
    }

    /// `c · x^k`.
    pub fn monomial(c: FieldElement, k: usize) -> Poly {
        let field = c.field().clone();
        let mut coeffs = vec![field.zero(); k];
        coeffs.push(c);
        Poly::new(field, coeffs)
    }

    pub fn x(field: &Field) -> Poly {
        Poly::monomial(field.one(), 1)
    }

    pub fn new(field: Field, coeffs: Vec<FieldElement>) -> Poly {
        for c in &coeffs {
            if *c.field() != field {
                panic!(
                    "{}",
                    Error::FieldMismatch {
                        left: field.describe(),
                        right: c.field().describe()
                    }
                );
            }
        }
        let mut p = Poly { field, coeffs };
        p.trim();
        p
    }

    pub fn from_ints(field: &Field, coeffs: &[i64]) -> Poly {
        Poly::new(field.clone(), coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(FieldElement::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn lead(&self) -> Option<&FieldElement> {
        self.coeffs.last()
    }

    pub fn check_same_field(&self, other: &Poly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.field.describe(),
                right: other.field.describe(),
            })
        }
    }

    fn assert_same_field(&self, other: &Poly) {
        if let Err(e) = self.check_same_field(other) {
            panic!("{e}");
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.field);
        }
        Poly {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Scaled to leading coefficient 1; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => self.clone(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => self.scale(&l.inverse().expect("nonzero lead")),
        }
    }

    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(&self.field);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        self.assert_same_field(divisor);
        let dlead = divisor.lead().expect("division by the zero polynomial");
        let inv = dlead.inverse().expect("nonzero lead");
        let dn = divisor.coeffs.len();
        let mut r = self.coeffs.clone();
        if r.len() < dn {
            return (Poly::zero(&self.field), self.clone());
        }
        let mut q = vec![self.field.zero(); r.len() - dn + 1];
        while r.len() >= dn {
            let top = r.last().expect("nonempty").clone();
            let shift = r.len() - dn;
            if !top.is_zero() {
                let c = &top * &inv;
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    if !d.is_zero() {
                        r[shift + i] = &r[shift + i] - &(&c * d);
                    }
                }
                q[shift] = c;
            }
            r.pop();
        }
        (Poly::new(self.field.clone(), q), Poly::new(self.field.clone(), r))
    }

    /// `Some(q)` with `self = q · divisor`, `None` when the division is not exact.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.assert_same_field(other);
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &self.field.from_int(i as i64))
            .collect();
        Poly::new(self.field.clone(), coeffs)
    }

    pub fn eval(&self, z: &FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| &(&acc * z) + c)
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        self.assert_same_field(inner);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(&self.field), |acc, c| {
                &(&acc * inner) + &Poly::constant(c.clone())
            })
    }

    /// `x^n · self(1/x)` for `n >= deg self`.
    pub fn reversed(&self, n: usize) -> Poly {
        assert!(self.deg() <= n, "reversal degree below polynomial degree");
        let mut coeffs = vec![self.field.zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[n - i] = c.clone();
        }
        Poly::new(self.field.clone(), coeffs)
    }

    /// Yun's square-free decomposition: monic pairwise coprime square-free
    /// `(a_i, i)` with `self = lead · Π a_i^i`; constant factors omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.exact_div(&a0).expect("gcd divides");
        let mut c = df.exact_div(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while !b.is_constant() {
            let a = b.gcd(&d);
            b = b.exact_div(&a).expect("gcd divides");
            c = d.exact_div(&a).expect("gcd divides");
            d = &c - &b.derivative();
            if !a.is_constant() {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    /// Resultant `Res(self, other)` by the Euclidean algorithm.
    pub fn resultant(&self, other: &Poly) -> FieldElement {
        self.assert_same_field(other);
        let field = self.field.clone();
        if self.is_zero() || other.is_zero() {
            return field.zero();
        }
        let mut a = self.clone();
        let mut b = other.clone();
        let mut acc = field.one();
        loop {
            let (da, db) = (a.deg(), b.deg());
            if db == 0 {
                return &acc * &b.coeffs[0].pow(da as u32);
            }
            let (_, r) = a.div_rem(&b);
            if r.is_zero() {
                return field.zero();
            }
            let dr = r.deg();
            if da % 2 == 1 && db % 2 == 1 {
                acc = -acc;
            }
            acc = &acc * &b.lead().expect("nonzero").pow((da - dr) as u32);
            a = b;
            b = r;
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(FieldElement::to_complex).collect()
    }

    pub fn fmt_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let term = if mono.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mono
            } else if (-c).is_one() {
                format!("-{mono}")
            } else {
                format!("{c}*{mono}")
            };
            terms.push(term);
        }
        let mut s = terms[0].clone();
        for t in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(t);
            }
        }
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_in("z"))
    }
}

fn add_impl(a: &Poly, b: &Poly) -> Poly {
    a.assert_same_field(b);
    let n = a.coeffs.len().max(b.coeffs.len());
    let coeffs = (0..n)
        .map(|i| match (a.coeffs.get(i), b.coeffs.get(i)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    Poly::new(a.field.clone(), coeffs)
}

fn sub_impl(a: &Poly, b: &Poly) -> Poly {
    add_impl(a, &-b)
}

fn mul_impl(a: &Poly, b: &Poly) -> Poly {
    a.assert_same_field(b);
    if a.is_zero() || b.is_zero() {
        return Poly::zero(&a.field);
    }
    let mut coeffs = vec![a.field.zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            if !y.is_zero() {
                coeffs[i + j] = &coeffs[i + j] + &(x * y);
            }
        }
    }
    Poly::new(a.field.clone(), coeffs)
}

macro_rules! binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                $imp(self, rhs)
            }
        }
        impl $trait<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                $imp(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
