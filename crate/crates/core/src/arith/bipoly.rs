//! Bivariate polynomials, stored as polynomials in `y` whose coefficients are
//! polynomials in `x`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::field::{Field, FieldElement};
use super::poly::Poly;
use crate::numeric::roots;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    field: Field,
    /// `rows[j]` is the coefficient of `y^j`; no trailing zero rows.
    rows: Vec<Poly>,
}

impl BiPoly {
    pub fn zero(field: &Field) -> BiPoly {
        BiPoly {
            field: field.clone(),
            rows: Vec::new(),
        }
    }

    pub fn one(field: &Field) -> BiPoly {
        BiPoly::from_rows(field, vec![Poly::one(field)])
    }

    pub fn from_rows(field: &Field, rows: Vec<Poly>) -> BiPoly {
        let mut b = BiPoly {
            field: field.clone(),
            rows,
        };
        b.trim();
        b
    }

    /// From a matrix indexed `[deg in x][deg in y]`.
    pub fn from_matrix(field: &Field, m: &[Vec<FieldElement>]) -> BiPoly {
        let ny = m.iter().map(Vec::len).max().unwrap_or(0);
        let rows = (0..ny)
            .map(|j| {
                Poly::new(
                    field.clone(),
                    m.iter()
                        .map(|row| row.get(j).cloned().unwrap_or_else(|| field.zero()))
                        .collect(),
                )
            })
            .collect();
        BiPoly::from_rows(field, rows)
    }

    /// A polynomial in `x` alone.
    pub fn from_x(p: &Poly) -> BiPoly {
        BiPoly::from_rows(p.field(), vec![p.clone()])
    }

    /// A polynomial in `y` alone.
    pub fn from_y(p: &Poly) -> BiPoly {
        let rows = p.coeffs().iter().map(|c| Poly::constant(c.clone())).collect();
        BiPoly::from_rows(p.field(), rows)
    }

    /// `x − y`.
    pub fn x_minus_y(field: &Field) -> BiPoly {
        BiPoly::from_x(&Poly::x(field)) - BiPoly::from_y(&Poly::x(field))
    }

    /// `p(x) q(y) − p(y) q(x)`, the defining polynomial of `{G(x) = G(y)}`
    /// for `G = p/q`.
    pub fn from_graph(p: &Poly, q: &Poly) -> BiPoly {
        let n = p.coeffs().len().max(q.coeffs().len());
        let rows = (0..n)
            .map(|j| &p.scale(&q.coeff(j)) - &q.scale(&p.coeff(j)))
            .collect();
        BiPoly::from_rows(p.field(), rows)
    }

    fn trim(&mut self) {
        while self.rows.last().is_some_and(Poly::is_zero) {
            self.rows.pop();
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> &[Poly] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// `(max x-degree, max y-degree)`; `(0, 0)` for constants and zero.
    pub fn bidegree(&self) -> (usize, usize) {
        let dx = self.rows.iter().map(Poly::deg).max().unwrap_or(0);
        (dx, self.rows.len().saturating_sub(1))
    }

    pub fn coeff(&self, i: usize, j: usize) -> FieldElement {
        self.rows
            .get(j)
            .map(|r| r.coeff(i))
            .unwrap_or_else(|| self.field.zero())
    }

    /// Coefficient matrix indexed `[deg in x][deg in y]`.
    pub fn matrix(&self) -> Vec<Vec<FieldElement>> {
        let (dx, dy) = self.bidegree();
        if self.is_zero() {
            return Vec::new();
        }
        (0..=dx)
            .map(|i| (0..=dy).map(|j| self.coeff(i, j)).collect())
            .collect()
    }

    pub fn transpose(&self) -> BiPoly {
        BiPoly::from_matrix(&self.field, &transpose_matrix(&self.matrix()))
    }

    pub fn scale(&self, c: &FieldElement) -> BiPoly {
        BiPoly::from_rows(&self.field, self.rows.iter().map(|r| r.scale(c)).collect())
    }

    /// Scaled so the leading coefficient in graded order (highest total
    /// degree, then highest x-degree) is 1.
    pub fn normalized(&self) -> BiPoly {
        match self.leading_graded() {
            None => self.clone(),
            Some(c) => self.scale(&c.inverse().expect("nonzero")),
        }
    }

    fn leading_graded(&self) -> Option<FieldElement> {
        let mut best: Option<((usize, usize), FieldElement)> = None;
        for (j, row) in self.rows.iter().enumerate() {
            for (i, c) in row.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let key = (i + j, i);
                if best.as_ref().is_none_or(|(k, _)| key > *k) {
                    best = Some((key, c.clone()));
                }
            }
        }
        best.map(|(_, c)| c)
    }

    /// `Some(q)` with `self = divisor · q`, `None` if the division is not exact.
    pub fn divide_exact(&self, divisor: &BiPoly) -> Option<BiPoly> {
        let dlead = divisor.rows.last().expect("division by the zero polynomial");
        let dn = divisor.rows.len();
        let mut r = self.rows.clone();
        if r.is_empty() {
            return Some(BiPoly::zero(&self.field));
        }
        if r.len() < dn {
            return None;
        }
        let mut q = vec![Poly::zero(&self.field); r.len() - dn + 1];
        while r.len() >= dn {
            let top = r.last().expect("nonempty").clone();
            let shift = r.len() - dn;
            if !top.is_zero() {
                let c = top.exact_div(dlead)?;
                for (i, d) in divisor.rows.iter().enumerate() {
                    if !d.is_zero() {
                        r[shift + i] = &r[shift + i] - &(&c * d);
                    }
                }
                q[shift] = c;
            }
            r.pop();
        }
        if r.iter().all(Poly::is_zero) {
            Some(BiPoly::from_rows(&self.field, q))
        } else {
            None
        }
    }

    /// Specializes `x`, leaving a polynomial in `y`.
    pub fn eval_x(&self, x: &FieldElement) -> Poly {
        let coeffs = self.rows.iter().map(|r| r.eval(x)).collect();
        Poly::new(self.field.clone(), coeffs)
    }

    pub fn eval(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.eval_x(x).eval(y)
    }

    /// Numeric coefficients in `y` at a complex `x`.
    pub fn y_coeffs_at(&self, x: Complex64) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|r| roots::eval(&r.to_complex(), x))
            .collect()
    }

    pub fn eval_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        roots::eval(&self.y_coeffs_at(x), y)
    }

    /// Substitutes `x = (a u + b)/(c u + d)` and `y = (a v + b)/(c v + d)`,
    /// clearing denominators with `(c u + d)^{dx} (c v + d)^{dy}` for the
    /// current bidegree.
    pub fn mobius_substitute(
        &self,
        a: &FieldElement,
        b: &FieldElement,
        c: &FieldElement,
        d: &FieldElement,
    ) -> BiPoly {
        let (dx, dy) = self.bidegree();
        let num = Poly::new(self.field.clone(), vec![b.clone(), a.clone()]);
        let den = Poly::new(self.field.clone(), vec![d.clone(), c.clone()]);
        let num_pows = powers(&num, dx.max(dy));
        let den_pows = powers(&den, dx.max(dy));
        // Each x-polynomial row becomes Σ_i c_i num^i den^{dx−i}.
        let homog = |p: &Poly, n: usize| -> Poly {
            p.coeffs()
                .iter()
                .enumerate()
                .fold(Poly::zero(&self.field), |acc, (i, ci)| {
                    &acc + &(&num_pows[i] * &den_pows[n - i]).scale(ci)
                })
        };
        let mut out = BiPoly::zero(&self.field);
        for (j, row) in self.rows.iter().enumerate() {
            let xpart = BiPoly::from_x(&homog(row, dx));
            let ypart = BiPoly::from_y(&(&num_pows[j] * &den_pows[dy - j]));
            out = out + &xpart * &ypart;
        }
        out
    }

    pub fn to_strings(&self) -> Vec<Vec<Vec<String>>> {
        self.matrix()
            .iter()
            .map(|row| row.iter().map(FieldElement::to_strings).collect())
            .collect()
    }
}

fn powers(p: &Poly, n: usize) -> Vec<Poly> {
    let mut out = vec![Poly::one(p.field())];
    for i in 0..n {
        let next = &out[i] * p;
        out.push(next);
    }
    out
}

fn transpose_matrix(m: &[Vec<FieldElement>]) -> Vec<Vec<FieldElement>> {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<((usize, usize), String)> = Vec::new();
        for (j, row) in self.rows.iter().enumerate() {
            for (i, c) in row.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut mono = String::new();
                for (var, k) in [("x", i), ("y", j)] {
                    match k {
                        0 => {}
                        1 => mono.push_str(var),
                        _ => mono.push_str(&format!("{var}^{k}")),
                    }
                }
                let term = if mono.is_empty() {
                    c.to_string()
                } else if c.is_one() {
                    mono
                } else if (-c).is_one() {
                    format!("-{mono}")
                } else {
                    format!("{c}*{mono}")
                };
                terms.push(((i + j, i), term));
            }
        }
        terms.sort_by_key(|t| std::cmp::Reverse(t.0));
        let mut s = terms[0].1.clone();
        for (_, t) in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(t);
            }
        }
        write!(f, "{s}")
    }
}

fn add_impl(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let n = a.rows.len().max(b.rows.len());
    let rows = (0..n)
        .map(|j| match (a.rows.get(j), b.rows.get(j)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    BiPoly::from_rows(&a.field, rows)
}

fn sub_impl(a: &BiPoly, b: &BiPoly) -> BiPoly {
    add_impl(a, &-b)
}

fn mul_impl(a: &BiPoly, b: &BiPoly) -> BiPoly {
    if a.is_zero() || b.is_zero() {
        return BiPoly::zero(&a.field);
    }
    let mut rows = vec![Poly::zero(&a.field); a.rows.len() + b.rows.len() - 1];
    for (i, x) in a.rows.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.rows.iter().enumerate() {
            if !y.is_zero() {
                rows[i + j] = &rows[i + j] + &(x * y);
            }
        }
    }
    BiPoly::from_rows(&a.field, rows)
}

macro_rules! binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&BiPoly> for &BiPoly {
            type Output = BiPoly;
            fn $method(self, rhs: &BiPoly) -> BiPoly {
                $imp(self, rhs)
            }
        }
        impl $trait<BiPoly> for BiPoly {
            type Output = BiPoly;
            fn $method(self, rhs: BiPoly) -> BiPoly {
                $imp(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly::from_rows(&self.field, self.rows.iter().map(|r| -r).collect())
    }
}

impl Neg for BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        -&self
    }
}
