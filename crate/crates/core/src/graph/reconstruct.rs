//! Exact component polynomials from sampled fiber points.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;

use super::components::ComponentCertificate;
use super::curve::GraphCurve;
use super::track::Path;
use crate::arith::rational::rationalize;
use crate::arith::{BiPoly, Field, FieldElement};
use crate::error::Result;
use crate::numeric::Point;

pub const MAX_DENOMINATOR: u64 = 1_000_000;
const RATIONALIZE_TOL: f64 = 1e-8;
/// Second-smallest over largest singular value must exceed this for the
/// null space to count as one-dimensional.
const GAP_TOL: f64 = 1e-7;
const NULL_TOL: f64 = 1e-9;

/// Why an exact factor could not be certified.
#[derive(Clone, Debug, PartialEq)]
pub enum ReconstructFailure {
    Tracking(String),
    NullSpace { smallest: f64, second: f64 },
    Rationalization { coefficient: Complex64 },
    NotAFactor,
}

impl std::fmt::Display for ReconstructFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReconstructFailure::Tracking(e) => write!(f, "tracking failed: {e}"),
            ReconstructFailure::NullSpace { smallest, second } => write!(
                f,
                "interpolation null space not one-dimensional (relative singular values {smallest:.3e}, {second:.3e})"
            ),
            ReconstructFailure::Rationalization { coefficient } => {
                write!(f, "coefficient {coefficient} has no small rational form in the field")
            }
            ReconstructFailure::NotAFactor => write!(f, "candidate does not divide the graph polynomial"),
        }
    }
}

/// Fibers at `n` equally spaced points of the basepoint circle, continued
/// from the basepoint fiber so that indices stay attached to sheets.
fn circle_samples(curve: &GraphCurve, n: usize) -> Result<Vec<(Complex64, Vec<Point>)>> {
    let sweep = std::f64::consts::TAU / n as f64;
    let mut pts = curve.fiber.clone();
    let mut out = Vec::with_capacity(n);
    let mut angle = curve.base_angle;
    out.push((curve.basepoint, pts.clone()));
    for k in 1..n {
        let arc = Path::Arc {
            center: curve.base_center,
            radius: curve.base_radius,
            start: angle,
            sweep,
        };
        pts = curve.tracker.track(&arc, &pts, &format!("reconstruction arc {k}"))?;
        angle += sweep;
        out.push((arc.at(1.0), pts.clone()));
    }
    Ok(out)
}

fn to_field(z: Complex64, field: &Field) -> Option<FieldElement> {
    let scale = z.norm().max(1.0);
    match field.degree() {
        1 => {
            if z.im.abs() > RATIONALIZE_TOL * scale {
                return None;
            }
            Some(field.from_rational(rationalize(z.re, MAX_DENOMINATOR, RATIONALIZE_TOL * scale)?))
        }
        2 => {
            let alpha = field.embedding();
            if alpha.im.abs() < 1e-6 {
                return None;
            }
            let q1 = z.im / alpha.im;
            let q0 = z.re - q1 * alpha.re;
            let q0 = rationalize(q0, MAX_DENOMINATOR, RATIONALIZE_TOL * scale)?;
            let q1 = rationalize(q1, MAX_DENOMINATOR, RATIONALIZE_TOL * scale)?;
            Some(field.element(vec![q0, q1]))
        }
        _ => None,
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Interpolates the bidegree-`(r, r)` polynomial through the component's
/// points over samples of the basepoint circle, rationalizes it, checks it
/// divides `P` exactly and maps it back to the original coordinates.
pub fn reconstruct_component(
    curve: &GraphCurve,
    cert: &ComponentCertificate,
) -> std::result::Result<BiPoly, ReconstructFailure> {
    if cert.is_diagonal {
        return Ok(BiPoly::x_minus_y(curve.g.field()));
    }
    let r = cert.orbit.len();
    let unknowns = (r + 1) * (r + 1);
    let n = 2 * (2 * r + 1).max((unknowns + 4).div_ceil(r));
    let samples = circle_samples(curve, n).map_err(|e| ReconstructFailure::Tracking(e.to_string()))?;
    let (c, radius) = (curve.base_center, curve.base_radius);

    // Unknowns C[a][b] for s^a t^b with s = (x − c)/R, t = (y − c)/R.
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(n * r);
    for (x, fiber) in &samples {
        let s = (x - c) / radius;
        for &i in &cert.orbit {
            let mut row = vec![Complex64::new(0.0, 0.0); unknowns];
            let (v, use_w) = match fiber[i] {
                Point::Infinity => (Complex64::new(0.0, 0.0), true),
                Point::Finite(y) => {
                    let t = (y - c) / radius;
                    if t.norm() > 1.0 {
                        (t.inv(), true)
                    } else {
                        (t, false)
                    }
                }
            };
            for a in 0..=r {
                let sa = s.powu(a as u32);
                for b in 0..=r {
                    let e = if use_w { r - b } else { b };
                    row[a * (r + 1) + b] = sa * v.powu(e as u32);
                }
            }
            let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            rows.push(row.into_iter().map(|z| z / norm).collect());
        }
    }
    let m = DMatrix::from_fn(rows.len(), unknowns, |i, j| rows[i][j]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let top = svd.singular_values[order[order.len() - 1]];
    let smallest = svd.singular_values[order[0]] / top;
    let second = svd.singular_values[order[1]] / top;
    if smallest > NULL_TOL || second < GAP_TOL {
        return Err(ReconstructFailure::NullSpace { smallest, second });
    }
    let null: Vec<Complex64> = (0..unknowns).map(|j| v_t[(order[0], j)].conj()).collect();

    // Expand s^a t^b with s^a = R^{−a} Σ_k binom(a, k) x^k (−c)^{a−k}, and
    // likewise for t^b in y.
    let expand: Vec<Vec<Complex64>> = (0..=r)
        .map(|a| {
            let scale = radius.powi(-(a as i32));
            (0..=r)
                .map(|k| {
                    if k > a {
                        Complex64::new(0.0, 0.0)
                    } else {
                        (-c).powu((a - k) as u32) * binomial(a, k) * scale
                    }
                })
                .collect()
        })
        .collect();
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); r + 1]; r + 1];
    for a in 0..=r {
        for b in 0..=r {
            let cab = null[a * (r + 1) + b];
            for k in 0..=a {
                for l in 0..=b {
                    coeffs[k][l] += cab * expand[a][k] * expand[b][l];
                }
            }
        }
    }
    let pivot = coeffs
        .iter()
        .flatten()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("nonempty");
    let field = curve.g.field();
    let mut exact = Vec::with_capacity(r + 1);
    for row in &coeffs {
        let mut out = Vec::with_capacity(r + 1);
        for z in row {
            let z = z / pivot;
            out.push(to_field(z, field).ok_or(ReconstructFailure::Rationalization { coefficient: z })?);
        }
        exact.push(out);
    }
    let candidate = BiPoly::from_matrix(field, &exact);
    if curve.p_chart.divide_exact(&candidate).is_none() {
        return Err(ReconstructFailure::NotAFactor);
    }
    let original = if curve.chart.is_identity() {
        candidate
    } else {
        let [a, b, c, d] = curve.chart.inverse().entries().map(Clone::clone);
        candidate.mobius_substitute(&a, &b, &c, &d)
    };
    let original = clear_denominators(&original.normalized());
    if original.bidegree() != (r, r) || curve.p.divide_exact(&original).is_none() {
        return Err(ReconstructFailure::NotAFactor);
    }
    Ok(original)
}

/// Over ℚ, scales to coprime integer coefficients; otherwise unchanged.
pub(crate) fn clear_denominators(p: &BiPoly) -> BiPoly {
    let field = p.field();
    if !field.is_rational() {
        return p.clone();
    }
    let m = p.matrix();
    let values: Vec<_> = m.iter().flatten().filter_map(|e| e.as_rational().cloned()).collect();
    let den = crate::arith::rational::common_denominator(values.iter());
    let scaled: Vec<_> = values.iter().map(|q| (q * num_rational::BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = scaled.iter().fold(BigInt::from(0), |acc, n| num_integer::Integer::gcd(&acc, n));
    if g.is_one() || g == BigInt::from(0) {
        return p.scale(&field.from_rational(num_rational::BigRational::from_integer(den)));
    }
    p.scale(&field.from_rational(num_rational::BigRational::new(den, g)))
}
