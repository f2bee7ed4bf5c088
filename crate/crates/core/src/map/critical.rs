//! Critical points and critical values with exact multiplicities.

use serde::Serialize;

use super::RationalMap;
use crate::arith::Poly;
use crate::error::{Error, Result};
use crate::numeric::{roots, Point};

/// Finite critical values within this relative distance are treated as one
/// value. A finite value never merges with ∞, which is exact.
pub const VALUE_CLUSTER_TOL: f64 = 1e-7;

fn same_value(a: &Point, b: &Point) -> bool {
    match (a, b) {
        (Point::Infinity, Point::Infinity) => true,
        (Point::Finite(x), Point::Finite(y)) => (x - y).norm() <= VALUE_CLUSTER_TOL * x.norm().max(y.norm()).max(1.0),
        _ => false,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub point: Point,
    /// Order of vanishing of the derivative; the local degree is one more.
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalValue {
    pub value: Point,
    /// Total critical multiplicity over this value.
    pub multiplicity: usize,
    /// Exactly one critical point, counted with multiplicity, lies above it.
    pub simple: bool,
    /// Indices into [`CriticalData::points`].
    pub points: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalData {
    pub points: Vec<CriticalPoint>,
    pub values: Vec<CriticalValue>,
}

impl CriticalData {
    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    pub fn simple_value_count(&self) -> usize {
        self.values.iter().filter(|v| v.simple).count()
    }
}

/// The Wronskian `num'·den − num·den'`, whose roots are the finite critical
/// points.
pub fn wronskian(f: &RationalMap) -> Poly {
    &(&f.num().derivative() * f.den()) - &(f.num() * &f.den().derivative())
}

/// Critical points from the exact square-free decomposition of the
/// Wronskian, cross-checked against the raw numeric roots; ∞ is critical
/// when the Wronskian's degree falls short of `2d − 2`.
pub fn critical_data(f: &RationalMap) -> Result<CriticalData> {
    let d = f.degree();
    if d < 2 {
        return Err(Error::Precondition(format!(
            "critical data needs degree >= 2, got {d}"
        )));
    }
    let w = wronskian(f);
    let w_deg = w.degree().ok_or_else(|| {
        Error::Consistency("Wronskian vanishes identically for a nonconstant map".into())
    })?;
    let mut points: Vec<CriticalPoint> = Vec::new();
    for (factor, mult) in w.squarefree_decomposition() {
        for z in roots::roots(&factor.to_complex())? {
            points.push(CriticalPoint {
                point: Point::Finite(z),
                multiplicity: mult,
            });
        }
    }
    cross_check(&w, &points)?;
    let at_infinity = 2 * d - 2 - w_deg;
    if at_infinity > 0 {
        points.push(CriticalPoint {
            point: Point::Infinity,
            multiplicity: at_infinity,
        });
    }
    points.sort_by(|a, b| point_key(&a.point).partial_cmp(&point_key(&b.point)).unwrap());
    let total: usize = points.iter().map(|p| p.multiplicity).sum();
    if total != 2 * d - 2 {
        return Err(Error::Consistency(format!(
            "critical multiplicities sum to {total}, expected {}",
            2 * d - 2
        )));
    }

    let images: Vec<Point> = points.iter().map(|p| f.evaluate(p.point)).collect();
    let mut values: Vec<CriticalValue> = Vec::new();
    for (i, img) in images.iter().enumerate() {
        match values
            .iter_mut()
            .find(|v| same_value(&v.value, img))
        {
            Some(v) => {
                v.multiplicity += points[i].multiplicity;
                v.points.push(i);
            }
            None => values.push(CriticalValue {
                value: *img,
                multiplicity: points[i].multiplicity,
                simple: false,
                points: vec![i],
            }),
        }
    }
    for v in &mut values {
        v.simple = v.multiplicity == 1;
    }
    Ok(CriticalData { points, values })
}

fn point_key(p: &Point) -> (u8, f64, f64) {
    match p {
        Point::Finite(z) => (0, z.re, z.im),
        Point::Infinity => (1, 0.0, 0.0),
    }
}

/// Largest chordal distance between a raw Wronskian root and the critical
/// point it is matched to. Raw roots of a clustered Wronskian are only
/// accurate to about 1e−3, while a mislabelled multiplicity leaves some raw
/// root with no nearby partner.
const CROSS_CHECK_TOL: f64 = 1e-2;
/// Distinct roots of a square-free factor must stay at least this far apart.
const DISTINCT_ROOT_TOL: f64 = 1e-12;

/// Matches the numeric roots of the raw Wronskian to the critical points
/// found via the square-free factors, each point taking as many roots as its
/// multiplicity, closest pairs first. Every match must be short.
fn cross_check(w: &Poly, points: &[CriticalPoint]) -> Result<()> {
    let n = points.len();
    for i in 0..n {
        for k in 0..i {
            if points[i].point.chordal(&points[k].point) < DISTINCT_ROOT_TOL {
                return Err(Error::Consistency(format!(
                    "distinct critical points {} and {} are numerically indistinguishable",
                    points[i].point, points[k].point
                )));
            }
        }
    }
    let raw: Vec<Point> = roots::roots(&w.to_complex())?.into_iter().map(Point::Finite).collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(raw.len() * n);
    for (r, z) in raw.iter().enumerate() {
        for (i, p) in points.iter().enumerate() {
            pairs.push((p.point.chordal(z), r, i));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut capacity: Vec<usize> = points.iter().map(|p| p.multiplicity).collect();
    let mut matched = vec![false; raw.len()];
    for (dist, r, i) in pairs {
        if matched[r] || capacity[i] == 0 {
            continue;
        }
        if dist > CROSS_CHECK_TOL {
            return Err(Error::Consistency(format!(
                "numeric Wronskian root {} has no critical point of matching multiplicity nearby (closest free one is {})",
                raw[r], points[i].point
            )));
        }
        matched[r] = true;
        capacity[i] -= 1;
    }
    if let Some(i) = capacity.iter().position(|&c| c > 0) {
        return Err(Error::Consistency(format!(
            "critical point {} has exact multiplicity {} but fewer numeric roots cluster there",
            points[i].point, points[i].multiplicity
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Field;

    fn near(p: &Point, re: f64, im: f64) -> bool {
        p.chordal(&Point::new(re, im)) < 1e-9
    }

    #[test]
    fn square_map() {
        let f = RationalMap::power(&Field::rational(), 2).unwrap();
        let cd = critical_data(&f).unwrap();
        assert_eq!(cd.points.len(), 2);
        assert!(near(&cd.points[0].point, 0.0, 0.0));
        assert!(cd.points[1].point.is_infinite());
        assert_eq!(cd.values.len(), 2);
        assert!(cd.values.iter().all(|v| v.simple));
    }

    #[test]
    fn chebyshev_cubic() {
        let f = RationalMap::from_ints(&Field::rational(), &[0, -3, 0, 1], &[1]).unwrap();
        let cd = critical_data(&f).unwrap();
        assert_eq!(cd.total_multiplicity(), 4);
        let inf = cd.points.iter().find(|p| p.point.is_infinite()).unwrap();
        assert_eq!(inf.multiplicity, 2);
        assert!(cd.points.iter().any(|p| near(&p.point, 1.0, 0.0)));
        assert!(cd.points.iter().any(|p| near(&p.point, -1.0, 0.0)));
        for target in [2.0, -2.0] {
            let v = cd.values.iter().find(|v| near(&v.value, target, 0.0)).unwrap();
            assert!(v.simple);
        }
        let vinf = cd.values.iter().find(|v| v.value.is_infinite()).unwrap();
        assert!(!vinf.simple);
    }

    #[test]
    fn high_multiplicity_point() {
        // (z - 1)^4 z has derivative (z - 1)^3 (5z - 1).
        let k = Field::rational();
        let p = &Poly::from_ints(&k, &[-1, 1]).pow(4) * &Poly::x(&k);
        let f = RationalMap::from_poly(p).unwrap();
        let cd = critical_data(&f).unwrap();
        let one = cd.points.iter().find(|c| near(&c.point, 1.0, 0.0)).unwrap();
        assert_eq!(one.multiplicity, 3);
        assert_eq!(cd.total_multiplicity(), 8);
    }
}
