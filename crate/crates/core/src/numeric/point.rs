//! Points of the Riemann sphere and the chordal metric.

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Finite(Complex64),
    Infinity,
}

impl Point {
    pub fn new(re: f64, im: f64) -> Self {
        Point::Finite(Complex64::new(re, im))
    }

    /// `[n : d]` in homogeneous coordinates.
    pub fn from_homogeneous(n: Complex64, d: Complex64) -> Self {
        if d == Complex64::new(0.0, 0.0) {
            return Point::Infinity;
        }
        let z = n / d;
        if z.re.is_finite() && z.im.is_finite() {
            Point::Finite(z)
        } else {
            Point::Infinity
        }
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    /// `z ↦ 1/z`.
    pub fn recip(&self) -> Point {
        match *self {
            Point::Infinity => Point::Finite(Complex64::new(0.0, 0.0)),
            Point::Finite(z) if z.norm_sqr() == 0.0 => Point::Infinity,
            Point::Finite(z) => Point::Finite(z.inv()),
        }
    }

    /// Inverse stereographic projection onto the unit sphere in R³.
    pub fn to_sphere(&self) -> [f64; 3] {
        match *self {
            Point::Infinity => [0.0, 0.0, 1.0],
            Point::Finite(z) => {
                let r2 = z.norm_sqr();
                if !r2.is_finite() || r2 > 1e300 {
                    return [0.0, 0.0, 1.0];
                }
                let s = 1.0 + r2;
                [2.0 * z.re / s, 2.0 * z.im / s, (r2 - 1.0) / s]
            }
        }
    }

    pub fn from_sphere(p: [f64; 3]) -> Point {
        let denom = 1.0 - p[2];
        if denom <= 1e-300 {
            return Point::Infinity;
        }
        Point::new(p[0] / denom, p[1] / denom)
    }

    /// Chordal distance: the Euclidean distance between the lifts to the
    /// unit sphere, so it lies in `[0, 2]`.
    pub fn chordal(&self, other: &Point) -> f64 {
        match (*self, *other) {
            (Point::Infinity, Point::Infinity) => 0.0,
            (Point::Finite(z), Point::Infinity) | (Point::Infinity, Point::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (Point::Finite(z), Point::Finite(w)) => {
                let d = 2.0 * (z - w).norm()
                    / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt());
                if d.is_finite() {
                    d
                } else {
                    sphere_distance(self.to_sphere(), other.to_sphere())
                }
            }
        }
    }
}

pub fn sphere_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point::Finite(z)
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Point::Infinity => write!(f, "inf"),
            Point::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

/// Finite points serialize as `[re, im]`, infinity as `"inf"`.
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Point::Infinity => serializer.serialize_str("inf"),
            Point::Finite(z) => {
                // Adding 0.0 turns −0.0 into 0.0.
                let mut seq = serializer.serialize_seq(Some(2))?;
                seq.serialize_element(&(z.re + 0.0))?;
                seq.serialize_element(&(z.im + 0.0))?;
                seq.end()
            }
        }
    }
}
