//! The graph curve `V_G = {G(x) = G(y)}`, its branch locus, working chart
//! and basepoint.

use num_complex::Complex64;
use rand::Rng as _;
use serde::Serialize;

use super::track::Tracker;
use crate::arith::rational::{int, rationalize};
use crate::arith::BiPoly;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::map::{critical_data, ComplexMoebius, CriticalData, Moebius, RationalMap};
use crate::numeric::{roots, Point};

/// Branch points farther out than this force a rotated chart.
pub const CHART_MODULUS_LIMIT: f64 = 1e6;
const BRANCH_DEDUP_TOL: f64 = 1e-7;
const CHART_MARGIN: f64 = 1e-4;
const BASEPOINT_DRAWS: usize = 100;
const CHART_CANDIDATES: usize = 64;

/// A point over a critical value with its local degree under `G`.
#[derive(Clone, Debug, Serialize)]
pub struct FiberPoint {
    pub point: Point,
    pub local_degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchPoint {
    /// Original coordinates.
    pub point: Point,
    /// Working-chart coordinates; always finite.
    #[serde(skip)]
    pub chart_point: Complex64,
    pub value_index: usize,
    pub local_degree: usize,
}

#[derive(Clone, Debug)]
pub struct GraphCurve {
    pub g: RationalMap,
    /// `P(x, y) = p(x) q(y) − p(y) q(x)` for `G = p/q`.
    pub p: BiPoly,
    /// `x = φ(u)`; the identity unless ∞ or a far point is a branch point.
    pub chart: Moebius,
    pub g_chart: RationalMap,
    pub p_chart: BiPoly,
    pub critical: CriticalData,
    /// For each critical value, its full fiber with local degrees.
    pub value_fibers: Vec<Vec<FiberPoint>>,
    pub branch_points: Vec<BranchPoint>,
    /// `(value index, local degree)` of ∞ when it is a branch point with
    /// trivial monodromy that is not looped around.
    pub omitted_infinity: Option<(usize, usize)>,
    pub basepoint: Complex64,
    /// Fiber over the basepoint in chart coordinates; entry 0 is the
    /// basepoint itself.
    pub fiber: Vec<Point>,
    pub(crate) tracker: Tracker,
    /// Circle the basepoint was drawn on.
    pub(crate) base_center: Complex64,
    pub(crate) base_radius: f64,
    pub(crate) base_angle: f64,
}

/// The fiber over a critical value: numeric roots, with the multiple ones
/// replaced by the exact critical points.
fn value_fiber(g: &RationalMap, data: &CriticalData, value_index: usize) -> Result<Vec<FiberPoint>> {
    let v = &data.values[value_index];
    let mut numeric = g.preimages(v.value)?;
    let mut out = Vec::new();
    for &ci in &v.points {
        let c = &data.points[ci];
        let e = c.multiplicity + 1;
        for _ in 0..e {
            let (k, _) = numeric
                .iter()
                .enumerate()
                .map(|(k, z)| (k, z.chordal(&c.point)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .ok_or_else(|| Error::Consistency("fiber over a critical value is too small".into()))?;
            numeric.swap_remove(k);
        }
        out.push(FiberPoint {
            point: c.point,
            local_degree: e,
        });
    }
    out.extend(numeric.into_iter().map(|point| FiberPoint {
        point,
        local_degree: 1,
    }));
    Ok(out)
}

fn chart_ok(branch: &[Point], phi_inv: &ComplexMoebius, phi: &ComplexMoebius) -> Option<Vec<Complex64>> {
    let at_infinity = phi.apply(Point::Infinity);
    if branch.iter().any(|b| b.chordal(&at_infinity) < CHART_MARGIN) {
        return None;
    }
    branch
        .iter()
        .map(|b| match phi_inv.apply(*b) {
            Point::Finite(u) if u.norm() <= CHART_MODULUS_LIMIT => Some(u),
            _ => None,
        })
        .collect()
}

/// `φ⁻¹(x) = (x − q)/(x − p)` with `q` near the middle of the finite branch
/// points and the pole `p` a few spreads away, so the chart is nearly affine
/// on the branch locus and sends ∞ to 1.
fn random_chart(
    field: &crate::arith::Field,
    middle: f64,
    spread: f64,
    rng: &mut crate::config::Rng,
) -> Moebius {
    let round = |x: f64| rationalize(x, 32, f64::INFINITY).unwrap_or_else(|| int(0));
    let q = round(middle + spread * rng.gen_range(-0.25..0.25));
    let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let mut p = round(middle + side * spread * rng.gen_range(0.5..6.0));
    if p == q {
        p += int(1);
    }
    // φ(u) = (p u − q)/(u − 1).
    Moebius::new(
        field.from_rational(p),
        field.from_rational(-q),
        field.one(),
        -field.one(),
    )
    .expect("p ≠ q")
}

/// Minimal separation over maximal modulus of the charted branch points.
fn chart_score(points: &[Complex64]) -> f64 {
    let top = points.iter().map(|u| u.norm()).fold(1.0, f64::max);
    let mut sep = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            sep = sep.min((a - b).norm());
        }
    }
    sep / top
}

/// Builds `V_G`, its branch locus `G⁻¹(CV)`, the working chart and a
/// basepoint; see [`RunConfig`] for the random streams used.
pub fn build_graph(g: &RationalMap, config: &RunConfig) -> Result<GraphCurve> {
    let d = g.degree();
    if d < 2 {
        return Err(Error::Precondition(format!("graph curve needs degree >= 2, got {d}")));
    }
    let critical = critical_data(g)?;
    let value_fibers = (0..critical.values.len())
        .map(|i| value_fiber(g, &critical, i))
        .collect::<Result<Vec<_>>>()?;
    let mut branch: Vec<(Point, usize, usize)> = Vec::new();
    // Fibers of distinct critical values are disjoint, however close their
    // points; only repeats inside one fiber are merged.
    for (vi, fib) in value_fibers.iter().enumerate() {
        let start = branch.len();
        for fp in fib {
            if branch[start..].iter().all(|(b, _, _)| b.chordal(&fp.point) >= BRANCH_DEDUP_TOL) {
                branch.push((fp.point, vi, fp.local_degree));
            }
        }
    }
    // Above a branch point at ∞ where every local degree divides e_x, all
    // sheets are unramified and the loop around ∞ acts trivially. Leaving it
    // out keeps the identity chart, avoiding the d-fold root cluster a
    // finite image of ∞ would create for polynomials.
    let mut omitted_infinity = None;
    if let Some(k) = branch.iter().position(|b| b.0.is_infinite()) {
        let (_, vi, ex) = branch[k];
        if value_fibers[vi].iter().all(|fp| ex % fp.local_degree == 0) {
            let finite: Vec<Point> = branch.iter().filter(|b| !b.0.is_infinite()).map(|b| b.0).collect();
            if finite.iter().all(|b| b.finite().is_some_and(|z| z.norm() <= CHART_MODULUS_LIMIT)) {
                omitted_infinity = Some((vi, ex));
                branch.remove(k);
            }
        }
    }
    let points: Vec<Point> = branch.iter().map(|b| b.0).collect();

    let field = g.field();
    let mut chart = Moebius::identity(field);
    let mut chart_points = if omitted_infinity.is_some() {
        Some(points.iter().filter_map(|b| b.finite()).collect())
    } else {
        chart_ok(&points, &ComplexMoebius::identity(), &ComplexMoebius::identity())
    };
    if chart_points.is_none() {
        let mut rng = config.rng("graph.chart");
        let mut best = f64::NEG_INFINITY;
        let mut re: Vec<f64> = points.iter().filter_map(|b| b.finite()).map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        let middle = re.get(re.len() / 2).copied().unwrap_or(0.0).clamp(-1e6, 1e6);
        let mut dist: Vec<f64> = points
            .iter()
            .filter_map(|b| b.finite())
            .map(|z| (z - middle).norm())
            .collect();
        dist.sort_by(f64::total_cmp);
        let spread = dist.get(dist.len() * 3 / 4).copied().unwrap_or(1.0).clamp(1e-3, 1e6);
        for _ in 0..CHART_CANDIDATES {
            let candidate = random_chart(field, middle, spread, &mut rng);
            let c = candidate.to_complex();
            if let Some(us) = chart_ok(&points, &c.inverse(), &c) {
                let score = chart_score(&us);
                if score > best {
                    best = score;
                    chart = candidate;
                    chart_points = Some(us);
                }
            }
        }
    }
    if chart_points.is_none() {
        return Err(Error::Consistency("no Möbius chart keeps the branch locus finite".into()));
    }
    let chart_points = chart_points.expect("chart found");
    let g_chart = g.compose(&chart.to_map())?;
    let p = BiPoly::from_graph(g.num(), g.den());
    let p_chart = BiPoly::from_graph(g_chart.num(), g_chart.den());
    let branch_points: Vec<BranchPoint> = branch
        .iter()
        .zip(&chart_points)
        .map(|(&(point, value_index, local_degree), &u)| BranchPoint {
            point,
            chart_point: u,
            value_index,
            local_degree,
        })
        .collect();
    let tracker = Tracker::new(&p_chart).with_branch_points(chart_points.clone());
    let (base_center, base_radius, base_angle, basepoint, fiber) =
        choose_basepoint(&branch_points, &tracker, config)?;
    Ok(GraphCurve {
        g: g.clone(),
        p,
        chart,
        g_chart,
        p_chart,
        critical,
        value_fibers,
        branch_points,
        omitted_infinity,
        basepoint,
        fiber,
        tracker,
        base_center,
        base_radius,
        base_angle,
    })
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let t = ((p - a) * ab.conj()).re / ab.norm_sqr();
    (p - (a + ab * t.clamp(0.0, 1.0))).norm()
}

pub(crate) fn min_separation(branch: &[BranchPoint]) -> f64 {
    let mut sep = f64::INFINITY;
    for (i, a) in branch.iter().enumerate() {
        for b in &branch[i + 1..] {
            sep = sep.min((a.chart_point - b.chart_point).norm());
        }
    }
    sep
}

/// Sorted, certified, pairwise distinct fiber of `P(x, ·)`; `None` when the
/// roots are not distinct at the working tolerance or run off to ∞.
pub(crate) fn chart_fiber(tracker: &Tracker, x: Complex64, min_sep: f64) -> Option<Vec<Point>> {
    let c = tracker.y_coeffs(x);
    let ys = roots::roots(&c).ok()?;
    if ys.len() != tracker.degree_y() || ys.iter().any(|y| y.norm() > CHART_MODULUS_LIMIT) {
        return None;
    }
    let pts: Vec<Point> = ys.into_iter().map(Point::Finite).collect();
    for i in 0..pts.len() {
        for k in (i + 1)..pts.len() {
            if pts[i].chordal(&pts[k]) < min_sep {
                return None;
            }
        }
    }
    Some(pts)
}

type Basepoint = (Complex64, f64, f64, Complex64, Vec<Point>);

fn choose_basepoint(branch: &[BranchPoint], tracker: &Tracker, config: &RunConfig) -> Result<Basepoint> {
    let n = branch.len() as f64;
    let center = branch.iter().map(|b| b.chart_point).sum::<Complex64>() / n;
    let spread = branch
        .iter()
        .map(|b| (b.chart_point - center).norm())
        .fold(0.0, f64::max);
    let radius = 1.5 * spread + 1.0;
    let sep = min_separation(branch);
    let mut rng = config.rng("graph.basepoint");
    for _ in 0..BASEPOINT_DRAWS {
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let x0 = center + Complex64::from_polar(radius, angle);
        // Every ray to a branch point must clear the others.
        let clear = branch.iter().all(|b| {
            branch.iter().all(|o| {
                std::ptr::eq(b, o) || segment_distance(o.chart_point, x0, b.chart_point) >= 0.01 * sep
            })
        });
        if !clear {
            continue;
        }
        let Some(mut fiber) = chart_fiber(tracker, x0, 1e-6) else {
            continue;
        };
        let diag = (0..fiber.len())
            .min_by(|&a, &b| {
                fiber[a]
                    .chordal(&Point::Finite(x0))
                    .total_cmp(&fiber[b].chordal(&Point::Finite(x0)))
            })
            .expect("nonempty fiber");
        if fiber[diag].chordal(&Point::Finite(x0)) > 1e-8 {
            return Err(Error::Consistency(format!(
                "the basepoint {x0} is missing from its own fiber"
            )));
        }
        fiber.swap(0, diag);
        fiber[0] = Point::Finite(x0);
        return Ok((center, radius, angle, x0, fiber));
    }
    Err(Error::Precondition(format!(
        "no admissible basepoint after {BASEPOINT_DRAWS} draws with seed {}; try another seed or rescale the map",
        config.seed
    )))
}

/// The `d` solutions `y` of `G(y) = G(x0)` in original coordinates.
pub fn fiber_at(curve: &GraphCurve, x0: Complex64) -> Result<Vec<Point>> {
    let tracker = Tracker::new(&curve.p);
    let c = tracker.y_coeffs(x0);
    let mut ys: Vec<Point> = roots::roots(&c)?.into_iter().map(Point::Finite).collect();
    while ys.len() < curve.g.degree() {
        ys.push(Point::Infinity);
    }
    for i in 0..ys.len() {
        for k in (i + 1)..ys.len() {
            if ys[i].chordal(&ys[k]) < BRANCH_DEDUP_TOL {
                return Err(Error::Precondition(format!(
                    "x0 = {x0} is too close to the branch locus; fiber points coincide"
                )));
            }
        }
    }
    Ok(ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Field;

    #[test]
    fn square_branch_locus() {
        let g = RationalMap::power(&Field::rational(), 2).unwrap();
        let c = build_graph(&g, &RunConfig::default()).unwrap();
        // ∞ is fully ramified with a single preimage, so it is not looped.
        assert_eq!(c.branch_points.len(), 1);
        assert_eq!(c.omitted_infinity.map(|o| o.1), Some(2));
        assert!(c.branch_points[0].point.chordal(&Point::new(0.0, 0.0)) < 1e-12);
        assert!(c.chart.is_identity());
        let f = fiber_at(&c, Complex64::new(1.0, 0.0)).unwrap();
        assert!(f.iter().any(|p| p.chordal(&Point::new(-1.0, 0.0)) < 1e-12));
    }

    #[test]
    fn chebyshev_branch_locus() {
        let g = RationalMap::from_ints(&Field::rational(), &[0, -3, 0, 1], &[1]).unwrap();
        let c = build_graph(&g, &RunConfig::default()).unwrap();
        let mut finite: Vec<f64> = c
            .branch_points
            .iter()
            .filter_map(|b| b.point.finite())
            .map(|z| {
                assert!(z.im.abs() < 1e-9);
                z.re
            })
            .collect();
        finite.sort_by(f64::total_cmp);
        let expect = [-2.0, -1.0, 1.0, 2.0];
        assert_eq!(finite.len(), 4);
        for (a, b) in finite.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9);
        }
        let f = fiber_at(&c, Complex64::new(0.0, 0.0)).unwrap();
        let s3 = 3f64.sqrt();
        for y in [0.0, s3, -s3] {
            assert!(f.iter().any(|p| p.chordal(&Point::new(y, 0.0)) < 1e-12));
        }
        assert_eq!(c.fiber[0], Point::Finite(c.basepoint));
    }

    #[test]
    fn antisymmetric_with_diagonal() {
        let g = RationalMap::from_ints(&Field::rational(), &[1, 2, 0, 1], &[3, 0, 1]).unwrap();
        let c = build_graph(&g, &RunConfig::default()).unwrap();
        let sum = c.p.clone() + c.p.transpose();
        assert!(sum.is_zero());
        assert!(c.p.divide_exact(&BiPoly::x_minus_y(g.field())).is_some());
        assert_eq!(c.p.bidegree(), (3, 3));
    }
}
