//! Möbius transformations, exact over the coefficient field and numeric over ℂ.

use std::fmt;

use num_complex::Complex64;

use super::{ExactPoint, RationalMap};
use crate::arith::{Field, FieldElement, Poly};
use crate::error::{Error, Result};
use crate::numeric::Point;

/// `z ↦ (a z + b)/(c z + d)` with `ad − bc ≠ 0`, scaled so the first nonzero
/// entry of `(a, b, c, d)` is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moebius {
    a: FieldElement,
    b: FieldElement,
    c: FieldElement,
    d: FieldElement,
}

impl Moebius {
    pub fn new(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Result<Moebius> {
        for e in [&b, &c, &d] {
            a.check_same_field(e)?;
        }
        let det = &(&a * &d) - &(&b * &c);
        if det.is_zero() {
            return Err(Error::Precondition("Moebius determinant is zero".into()));
        }
        let pivot = [&a, &b, &c, &d]
            .into_iter()
            .find(|e| !e.is_zero())
            .expect("nonzero determinant")
            .inverse()
            .expect("nonzero");
        Ok(Moebius {
            a: &a * &pivot,
            b: &b * &pivot,
            c: &c * &pivot,
            d: &d * &pivot,
        })
    }

    pub fn identity(field: &Field) -> Moebius {
        Moebius::new(field.one(), field.zero(), field.zero(), field.one()).expect("det 1")
    }

    pub fn entries(&self) -> [&FieldElement; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn field(&self) -> &Field {
        self.a.field()
    }

    pub fn is_identity(&self) -> bool {
        *self == Moebius::identity(self.field())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Moebius) -> Moebius {
        Moebius::new(
            &(&self.a * &other.a) + &(&self.b * &other.c),
            &(&self.a * &other.b) + &(&self.b * &other.d),
            &(&self.c * &other.a) + &(&self.d * &other.c),
            &(&self.c * &other.b) + &(&self.d * &other.d),
        )
        .expect("product of invertible matrices")
    }

    pub fn inverse(&self) -> Moebius {
        Moebius::new(self.d.clone(), -&self.b, -&self.c, self.a.clone()).expect("invertible")
    }

    pub fn to_map(&self) -> RationalMap {
        let f = self.field();
        RationalMap::new(
            Poly::new(f.clone(), vec![self.b.clone(), self.a.clone()]),
            Poly::new(f.clone(), vec![self.d.clone(), self.c.clone()]),
        )
        .expect("nonzero determinant gives a degree-1 map")
    }

    pub fn apply_exact(&self, z: &ExactPoint) -> ExactPoint {
        let (x0, x1) = z.homogeneous(self.field());
        ExactPoint::from_homogeneous(
            &(&self.a * &x0) + &(&self.b * &x1),
            &(&self.c * &x0) + &(&self.d * &x1),
        )
    }

    pub fn to_complex(&self) -> ComplexMoebius {
        ComplexMoebius {
            a: self.a.to_complex(),
            b: self.b.to_complex(),
            c: self.c.to_complex(),
            d: self.d.to_complex(),
        }
    }

    /// The unique transformation with `σ(p_i) = q_i`.
    pub fn from_three_points(p: [&ExactPoint; 3], q: [&ExactPoint; 3], field: &Field) -> Result<Moebius> {
        let tp = exact_to_standard(p, field)?;
        let tq = exact_to_standard(q, field)?;
        Ok(tq.inverse().compose(&tp))
    }

    pub fn to_strings(&self) -> [Vec<String>; 4] {
        [
            self.a.to_strings(),
            self.b.to_strings(),
            self.c.to_strings(),
            self.d.to_strings(),
        ]
    }
}

impl fmt::Display for Moebius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_map())
    }
}

/// The transformation sending `p1, p2, p3` to `0, 1, ∞`.
fn exact_to_standard(p: [&ExactPoint; 3], field: &Field) -> Result<Moebius> {
    if p[0] == p[1] || p[1] == p[2] || p[0] == p[2] {
        return Err(Error::Precondition("three-point fit needs distinct points".into()));
    }
    let (one, zero) = (field.one(), field.zero());
    match (p[0], p[1], p[2]) {
        (ExactPoint::Infinity, ExactPoint::Finite(p2), ExactPoint::Finite(p3)) => {
            Moebius::new(zero, p2 - p3, one, -p3)
        }
        (ExactPoint::Finite(p1), ExactPoint::Infinity, ExactPoint::Finite(p3)) => {
            Moebius::new(one.clone(), -p1, one, -p3)
        }
        (ExactPoint::Finite(p1), ExactPoint::Finite(p2), ExactPoint::Infinity) => {
            Moebius::new(one, -p1, zero, p2 - p1)
        }
        (ExactPoint::Finite(p1), ExactPoint::Finite(p2), ExactPoint::Finite(p3)) => {
            let u = p2 - p3;
            let v = p2 - p1;
            Moebius::new(u.clone(), -&(p1 * &u), v.clone(), -&(p3 * &v))
        }
        _ => unreachable!("points are distinct"),
    }
}

/// A floating-point Möbius transformation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMoebius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl ComplexMoebius {
    pub fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        ComplexMoebius {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    pub fn apply(&self, z: Point) -> Point {
        match z {
            Point::Infinity => Point::from_homogeneous(self.a, self.c),
            Point::Finite(z) if z.norm() <= 1.0 => {
                Point::from_homogeneous(self.a * z + self.b, self.c * z + self.d)
            }
            Point::Finite(z) => {
                let w = z.inv();
                Point::from_homogeneous(self.a + self.b * w, self.c + self.d * w)
            }
        }
    }

    pub fn compose(&self, o: &ComplexMoebius) -> ComplexMoebius {
        ComplexMoebius {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> ComplexMoebius {
        ComplexMoebius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Entries scaled so the largest one is exactly 1.
    pub fn normalized(&self) -> ComplexMoebius {
        let entries = [self.a, self.b, self.c, self.d];
        let big = entries
            .iter()
            .copied()
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .expect("four entries");
        let s = big.inv();
        ComplexMoebius {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
    }

    /// The unique transformation with `σ(p_i) = q_i`.
    pub fn from_three_points(p: [Point; 3], q: [Point; 3]) -> Result<ComplexMoebius> {
        let tp = complex_to_standard(p)?;
        let tq = complex_to_standard(q)?;
        Ok(tq.inverse().compose(&tp))
    }
}

fn complex_to_standard(p: [Point; 3]) -> Result<ComplexMoebius> {
    let sep = p[0]
        .chordal(&p[1])
        .min(p[1].chordal(&p[2]))
        .min(p[0].chordal(&p[2]));
    if sep < 1e-12 {
        return Err(Error::Precondition("three-point fit needs distinct points".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let m = match (p[0], p[1], p[2]) {
        (Point::Infinity, Point::Finite(p2), Point::Finite(p3)) => (zero, p2 - p3, one, -p3),
        (Point::Finite(p1), Point::Infinity, Point::Finite(p3)) => (one, -p1, one, -p3),
        (Point::Finite(p1), Point::Finite(p2), Point::Infinity) => (one, -p1, zero, p2 - p1),
        (Point::Finite(p1), Point::Finite(p2), Point::Finite(p3)) => {
            let u = p2 - p3;
            let v = p2 - p1;
            (u, -p1 * u, v, -p3 * v)
        }
        _ => unreachable!("points are distinct"),
    };
    Ok(ComplexMoebius {
        a: m.0,
        b: m.1,
        c: m.2,
        d: m.3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_fits() {
        let k = Field::rational();
        let z0 = ExactPoint::Finite(k.zero());
        let z1 = ExactPoint::Finite(k.one());
        let inf = ExactPoint::Infinity;
        let id = Moebius::from_three_points([&z0, &z1, &inf], [&z0, &z1, &inf], &k).unwrap();
        assert!(id.is_identity());
        let flip = Moebius::from_three_points([&z0, &z1, &inf], [&z1, &z0, &inf], &k).unwrap();
        let expected = RationalMap::from_ints(&k, &[1, -1], &[1]).unwrap();
        assert_eq!(flip.to_map(), expected);
        assert!(Moebius::from_three_points([&z0, &z0, &inf], [&z0, &z1, &inf], &k).is_err());
    }

    #[test]
    fn complex_fit_agrees_with_exact() {
        let k = Field::gaussian();
        let i = k.generator();
        let pts = [
            ExactPoint::Finite(k.from_int(2)),
            ExactPoint::Finite(i.clone()),
            ExactPoint::Finite(-&i),
        ];
        let imgs = [
            ExactPoint::Infinity,
            ExactPoint::Finite(k.from_int(3)),
            ExactPoint::Finite(&i + &k.one()),
        ];
        let exact = Moebius::from_three_points(
            [&pts[0], &pts[1], &pts[2]],
            [&imgs[0], &imgs[1], &imgs[2]],
            &k,
        )
        .unwrap();
        let numeric = ComplexMoebius::from_three_points(
            [pts[0].to_point(), pts[1].to_point(), pts[2].to_point()],
            [imgs[0].to_point(), imgs[1].to_point(), imgs[2].to_point()],
        )
        .unwrap();
        let probe = Point::new(0.3, -0.7);
        let a = exact.to_complex().apply(probe);
        let b = numeric.apply(probe);
        assert!(a.chordal(&b) < 1e-12);
        for (p, q) in pts.iter().zip(&imgs) {
            assert_eq!(exact.apply_exact(p), *q);
        }
    }
}
