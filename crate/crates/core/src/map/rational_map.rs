use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::ExactPoint;
use crate::arith::rational::to_f64;
use crate::arith::{Field, FieldElement, Poly};
use crate::error::{Error, Result};
use crate::numeric::{roots, Point};

/// Default bound on the degree of composites built by iteration.
pub const DEFAULT_DEGREE_BUDGET: u128 = 4096;

/// A rational self-map `num/den` of P¹ with coprime parts and monic
/// denominator.
#[derive(Clone, Debug)]
pub struct RationalMap {
    num: Poly,
    den: Poly,
    numeric: OnceLock<NumericCoeffs>,
}

/// Numeric coefficients, both zero-padded to length `degree + 1`.
#[derive(Clone, Debug)]
struct NumericCoeffs {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
    /// Coordinates in the power basis, for cancellation-free evaluation.
    num_exact: Vec<Vec<BigRational>>,
    den_exact: Vec<Vec<BigRational>>,
}

impl PartialEq for RationalMap {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for RationalMap {}

impl RationalMap {
    /// Normalizes `num/den`: common factors removed, denominator monic.
    pub fn new(num: Poly, den: Poly) -> Result<RationalMap> {
        num.check_same_field(&den)?;
        if den.is_zero() {
            return Err(Error::InvalidMap("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides"),
                den.exact_div(&g).expect("gcd divides"),
            )
        };
        if num.is_constant() && den.is_constant() {
            return Err(Error::InvalidMap("constant map (degree 0)".into()));
        }
        Ok(RationalMap::normalized_coprime(num, den))
    }

    /// For parts already known to be coprime.
    fn normalized_coprime(num: Poly, den: Poly) -> RationalMap {
        let inv = den.lead().expect("nonzero").inverse().expect("nonzero");
        let (num, den) = if inv.is_one() {
            (num, den)
        } else {
            (num.scale(&inv), den.scale(&inv))
        };
        RationalMap {
            num,
            den,
            numeric: OnceLock::new(),
        }
    }

    pub fn from_poly(p: Poly) -> Result<RationalMap> {
        let one = Poly::one(p.field());
        RationalMap::new(p, one)
    }

    pub fn from_ints(field: &Field, num: &[i64], den: &[i64]) -> Result<RationalMap> {
        RationalMap::new(Poly::from_ints(field, num), Poly::from_ints(field, den))
    }

    pub fn identity(field: &Field) -> RationalMap {
        RationalMap::from_poly(Poly::x(field)).expect("z is a valid map")
    }

    /// `z^d`.
    pub fn power(field: &Field, d: usize) -> Result<RationalMap> {
        RationalMap::from_poly(Poly::monomial(field.one(), d))
    }

    /// A map of exact degree `d` over ℚ with coefficients `p/q`,
    /// `|p| ≤ max_num`, `1 ≤ q ≤ max_den`; redrawn until the reduced degree
    /// is `d`. `polynomial` fixes the denominator to 1.
    pub fn random<R: rand::Rng + ?Sized>(
        rng: &mut R,
        d: usize,
        max_num: i64,
        max_den: i64,
        polynomial: bool,
    ) -> RationalMap {
        let field = Field::rational();
        let mut draw = |len: usize| {
            let coeffs = (0..len)
                .map(|_| field.from_rational(crate::arith::rational::random_rational(rng, max_num, max_den)))
                .collect();
            Poly::new(field.clone(), coeffs)
        };
        loop {
            let num = draw(d + 1);
            let den = if polynomial { Poly::one(&field) } else { draw(d + 1) };
            if let Ok(f) = RationalMap::new(num, den) {
                if f.degree() == d {
                    return f;
                }
            }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn field(&self) -> &Field {
        self.num.field()
    }

    pub fn degree(&self) -> usize {
        self.num.deg().max(self.den.deg())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn check_same_field(&self, other: &RationalMap) -> Result<()> {
        self.num.check_same_field(&other.num)
    }

    /// `self ∘ inner`, built homogeneously: `Σ n_i P^i Q^{d−i} / Σ d_i P^i Q^{d−i}`
    /// for `inner = P/Q`. Coprimality is preserved, so no gcd is needed.
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap> {
        self.check_same_field(inner)?;
        let d = self.degree();
        let p_pows = powers(&inner.num, d);
        let q_pows = powers(&inner.den, d);
        let combine = |outer: &Poly| {
            (0..=d).fold(Poly::zero(self.field()), |acc, i| {
                let c = outer.coeff(i);
                if c.is_zero() {
                    acc
                } else {
                    &acc + &(&p_pows[i] * &q_pows[d - i]).scale(&c)
                }
            })
        };
        let num = combine(&self.num);
        let den = combine(&self.den);
        Ok(RationalMap::normalized_coprime(num, den))
    }

    /// `self^n` (n-fold composition), refused when `degree^n > budget`.
    pub fn iterate(&self, n: u32, budget: u128) -> Result<RationalMap> {
        if n == 0 {
            return Err(Error::Precondition("iterate count must be at least 1".into()));
        }
        let needed = (self.degree() as u128).checked_pow(n).unwrap_or(u128::MAX);
        if needed > budget {
            return Err(Error::Budget {
                what: format!("iterate of a degree-{} map {n} times", self.degree()),
                needed,
                limit: budget,
            });
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Exact equality of normalized maps.
    pub fn equals(&self, other: &RationalMap) -> Result<bool> {
        self.check_same_field(other)?;
        Ok(self == other)
    }

    /// Homogeneous exact evaluation at `[x0 : x1]`.
    pub fn eval_homogeneous(
        &self,
        x0: &FieldElement,
        x1: &FieldElement,
    ) -> (FieldElement, FieldElement) {
        let d = self.degree();
        let form = |p: &Poly| {
            // Horner in x0 with x1 weights: Σ c_i x0^i x1^{d−i}.
            let mut acc = self.field().zero();
            let mut x1_pow = self.field().one();
            let mut terms = Vec::with_capacity(d + 1);
            for i in (0..=d).rev() {
                terms.push((p.coeff(i), x1_pow.clone()));
                x1_pow = &x1_pow * x1;
            }
            for (c, w) in terms {
                acc = &(&acc * x0) + &(&c * &w);
            }
            acc
        };
        (form(&self.num), form(&self.den))
    }

    pub fn eval_exact(&self, z: &ExactPoint) -> ExactPoint {
        let field = self.field();
        let (x0, x1) = match z {
            ExactPoint::Finite(x) => (x.clone(), field.one()),
            ExactPoint::Infinity => (field.one(), field.zero()),
        };
        let (y0, y1) = self.eval_homogeneous(&x0, &x1);
        ExactPoint::from_homogeneous(y0, y1)
    }

    fn numeric(&self) -> &NumericCoeffs {
        self.numeric.get_or_init(|| {
            let d = self.degree();
            let pad = |p: &Poly| -> Vec<Complex64> {
                let mut v = p.to_complex();
                v.resize(d + 1, Complex64::new(0.0, 0.0));
                v
            };
            let exact = |p: &Poly| -> Vec<Vec<BigRational>> {
                (0..=d).map(|i| p.coeff(i).coords().to_vec()).collect()
            };
            NumericCoeffs {
                num: pad(&self.num),
                den: pad(&self.den),
                num_exact: exact(&self.num),
                den_exact: exact(&self.den),
            }
        })
    }

    /// Numeric coefficients of numerator and denominator, padded to
    /// `degree + 1` entries.
    pub fn complex_coeffs(&self) -> (&[Complex64], &[Complex64]) {
        let n = self.numeric();
        (&n.num, &n.den)
    }

    /// Projective numeric evaluation. Points with `|z| > 1` are evaluated in
    /// the chart `w = 1/z`; if numerator and denominator both cancel to noise
    /// the evaluation is redone exactly at the binary value of `z`.
    pub fn evaluate(&self, z: Point) -> Point {
        let nc = self.numeric();
        let d = self.degree();
        let (n, den, scale) = match z {
            Point::Infinity => (nc.num[d], nc.den[d], 1.0),
            Point::Finite(z) if z.norm() <= 1.0 => {
                let r = z.norm();
                let scale = abs_horner(&nc.num, &nc.den, r, false);
                (roots::eval(&nc.num, z), roots::eval(&nc.den, z), scale)
            }
            Point::Finite(z) => {
                let w = z.inv();
                let r = w.norm();
                let scale = abs_horner(&nc.num, &nc.den, r, true);
                (rev_eval(&nc.num, w), rev_eval(&nc.den, w), scale)
            }
        };
        if n.norm() + den.norm() > 1e-13 * scale {
            return Point::from_homogeneous(n, den);
        }
        self.evaluate_exact_binary(z)
    }

    fn evaluate_exact_binary(&self, z: Point) -> Point {
        let nc = self.numeric();
        let Point::Finite(z) = z else {
            return Point::from_homogeneous(nc.num[self.degree()], nc.den[self.degree()]);
        };
        let reversed = z.norm() > 1.0;
        let x = if reversed { z.inv() } else { z };
        let Some(g) = GaussRat::from_complex(x) else {
            return Point::from_homogeneous(roots::eval(&nc.num, z), roots::eval(&nc.den, z));
        };
        let n = self.exact_combination(&nc.num_exact, &g, reversed);
        let d = self.exact_combination(&nc.den_exact, &g, reversed);
        Point::from_homogeneous(n, d)
    }

    /// `Σ_i c_i x^i` (or `Σ_i c_i x^{deg−i}` when `reversed`) with the
    /// Gaussian-rational powers of `x` exact, per power-basis coordinate.
    fn exact_combination(
        &self,
        coeffs: &[Vec<BigRational>],
        x: &GaussRat,
        reversed: bool,
    ) -> Complex64 {
        let m = self.field().degree();
        let mut sums = vec![GaussRat::zero(); m];
        let mut pow = GaussRat::one();
        let d = coeffs.len() - 1;
        for step in 0..=d {
            let i = if reversed { d - step } else { step };
            for (k, c) in coeffs[i].iter().enumerate() {
                if !c.is_zero() {
                    sums[k] = sums[k].add(&pow.scale(c));
                }
            }
            pow = pow.mul(x);
        }
        let alpha = self.field().embedding();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut apow = Complex64::new(1.0, 0.0);
        for s in &sums {
            acc += s.to_complex() * apow;
            apow *= alpha;
        }
        acc
    }

    /// `f'(z)` at a finite point whose image is finite.
    pub fn derivative_at(&self, z: Complex64) -> Option<Complex64> {
        let nc = self.numeric();
        let (n, dn) = roots::eval_with_derivative(&nc.num, z);
        let (d, dd) = roots::eval_with_derivative(&nc.den, z);
        let out = (dn * d - n * dd) / (d * d);
        (out.re.is_finite() && out.im.is_finite()).then_some(out)
    }

    /// All `degree` preimages of `w`, with multiplicity; ∞ appears when the
    /// equation drops degree.
    pub fn preimages(&self, w: Point) -> Result<Vec<Point>> {
        let nc = self.numeric();
        let d = self.degree();
        let coeffs: Vec<Complex64> = match w {
            Point::Infinity => nc.den.clone(),
            Point::Finite(w) if w.norm() <= 1.0 => {
                nc.num.iter().zip(&nc.den).map(|(a, b)| a - w * b).collect()
            }
            Point::Finite(w) => {
                let v = w.inv();
                nc.num.iter().zip(&nc.den).map(|(a, b)| v * a - b).collect()
            }
        };
        let finite = roots::roots(&coeffs)?;
        let mut out: Vec<Point> = finite.into_iter().map(Point::Finite).collect();
        while out.len() < d {
            out.push(Point::Infinity);
        }
        Ok(out)
    }

    /// Short stable fingerprint of the normalized coefficients.
    pub fn digest(&self) -> String {
        let mut text = self.field().describe();
        for part in [&self.num, &self.den] {
            text.push('|');
            for c in part.coeffs() {
                text.push_str(&c.to_strings().join(","));
                text.push(';');
            }
        }
        format!("{:016x}", crate::config::fnv1a(text.as_bytes()))
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.den.is_constant() {
            self.num.fmt_in(var)
        } else {
            format!("({})/({})", self.num.fmt_in(var), self.den.fmt_in(var))
        }
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_in("z"))
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

fn rev_eval(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
}

fn abs_horner(a: &[Complex64], b: &[Complex64], r: f64, reversed: bool) -> f64 {
    let fold = |v: &[Complex64]| -> f64 {
        if reversed {
            v.iter().fold(0.0, |acc, c| acc * r + c.norm())
        } else {
            v.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
        }
    };
    fold(a) + fold(b)
}

/// Exact Gaussian rationals, used only for cancellation-free evaluation.
#[derive(Clone, Debug)]
struct GaussRat {
    re: BigRational,
    im: BigRational,
}

impl GaussRat {
    fn zero() -> Self {
        GaussRat {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    fn one() -> Self {
        GaussRat {
            re: BigRational::from_integer(1.into()),
            im: BigRational::zero(),
        }
    }

    fn from_complex(z: Complex64) -> Option<Self> {
        Some(GaussRat {
            re: BigRational::from_float(z.re)?,
            im: BigRational::from_float(z.im)?,
        })
    }

    fn add(&self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn mul(&self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn scale(&self, c: &BigRational) -> GaussRat {
        GaussRat {
            re: &self.re * c,
            im: &self.im * c,
        }
    }

    fn to_complex(&self) -> Complex64 {
        let conv = |q: &BigRational| {
            let v = to_f64(q);
            if v.is_finite() {
                v
            } else if q.is_negative() {
                f64::MIN
            } else {
                f64::MAX
            }
        };
        Complex64::new(conv(&self.re), conv(&self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qq() -> Field {
        Field::rational()
    }

    fn cheb() -> RationalMap {
        RationalMap::from_ints(&qq(), &[0, -3, 0, 1], &[1]).unwrap()
    }

    #[test]
    fn normalization_removes_common_factors() {
        // (z^2 - 1)/(2z - 2) = (z + 1)/2 → (1/2 z + 1/2)/1.
        let f = RationalMap::from_ints(&qq(), &[-1, 0, 1], &[-2, 2]).unwrap();
        assert_eq!(f.degree(), 1);
        assert!(f.den().is_constant());
        assert!(RationalMap::from_ints(&qq(), &[3], &[5]).is_err());
        assert!(RationalMap::from_ints(&qq(), &[1, 1], &[]).is_err());
    }

    #[test]
    fn composition_and_iteration() {
        let z2 = RationalMap::power(&qq(), 2).unwrap();
        let z3 = RationalMap::power(&qq(), 3).unwrap();
        assert_eq!(z2.compose(&z3).unwrap(), RationalMap::power(&qq(), 6).unwrap());
        assert_eq!(z2.iterate(3, 4096).unwrap(), RationalMap::power(&qq(), 8).unwrap());
        assert_eq!(z2.iterate(1, 4096).unwrap(), z2);
        assert!(matches!(z2.iterate(13, 4096), Err(Error::Budget { .. })));
        let f = cheb();
        assert_eq!(f.compose(&RationalMap::identity(&qq())).unwrap(), f);
    }

    #[test]
    fn numeric_evaluation() {
        let f = cheb();
        let two = f.evaluate(Point::new(2.0, 0.0)).finite().unwrap();
        assert!((two - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert_eq!(f.evaluate(Point::Infinity), Point::Infinity);
        let g = RationalMap::from_ints(&qq(), &[-1, 0, 1], &[1]).unwrap();
        assert_eq!(g.evaluate(Point::Infinity), Point::Infinity);
        let big = f.evaluate(Point::new(1e5, 0.0)).finite().unwrap();
        assert!((big.re / 1e15 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_evaluation_matches() {
        let f = cheb();
        let k = qq();
        let y = f.eval_exact(&ExactPoint::Finite(k.from_int(2)));
        assert_eq!(y, ExactPoint::Finite(k.from_int(2)));
        assert_eq!(f.eval_exact(&ExactPoint::Infinity), ExactPoint::Infinity);
    }

    #[test]
    fn preimages_of_chebyshev() {
        let f = cheb();
        let pre = f.preimages(Point::new(2.0, 0.0)).unwrap();
        let mut re: Vec<f64> = pre.iter().map(|p| p.finite().unwrap().re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-6 && (re[1] + 1.0).abs() < 1e-6);
        assert!((re[2] - 2.0).abs() < 1e-12);
        let inf = f.preimages(Point::Infinity).unwrap();
        assert!(inf.iter().all(Point::is_infinite));
    }
}
