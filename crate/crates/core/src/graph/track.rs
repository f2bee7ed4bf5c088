//! Predictor–corrector continuation of the fiber `{y : P(x, y) = 0}` along
//! paths in the `x`-plane.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::arith::BiPoly;
use crate::error::{Error, Result};
use crate::numeric::Point;

/// Clearance from the nearest branch point below which a path counts as
/// meeting it, relative to `max(|x|, 1)`.
pub const MIN_CLEARANCE: f64 = 1e-13;
/// Smallest step length in `x`, relative to `max(|x|, 1)`.
const MIN_STEP: f64 = 1e-14;
const INITIAL_STEP: f64 = 1.0 / 64.0;
const NEWTON_ITERS: usize = 8;
const NEWTON_TOL: f64 = 1e-11;
/// A stagnating Newton correction is accepted below this fraction of the
/// distance to the nearest other fiber point.
const NEWTON_FLOOR: f64 = 1e-3;

#[derive(Clone, Copy, Debug)]
pub enum Path {
    Segment { from: Complex64, to: Complex64 },
    /// `center + radius·e^{i(start + sweep·t)}`; a full counterclockwise
    /// turn has `sweep = 2π`.
    Arc { center: Complex64, radius: f64, start: f64, sweep: f64 },
}

impl Path {
    pub fn circle(center: Complex64, radius: f64, start: f64) -> Path {
        Path::Arc {
            center,
            radius,
            start,
            sweep: TAU,
        }
    }

    pub fn at(&self, t: f64) -> Complex64 {
        match *self {
            Path::Segment { from, to } => from + (to - from) * t,
            Path::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + Complex64::from_polar(radius, start + sweep * t),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Path::Segment { from, to } => (to - from).norm(),
            Path::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }
}

/// A fiber point in the chart where its coordinate is at most 2 in modulus.
#[derive(Clone, Copy, Debug)]
enum Chart {
    Y(Complex64),
    /// `w = 1/y`.
    W(Complex64),
}

impl Chart {
    fn from_point(p: Point) -> Chart {
        match p {
            Point::Infinity => Chart::W(Complex64::new(0.0, 0.0)),
            Point::Finite(y) if y.norm() > 2.0 => Chart::W(y.inv()),
            Point::Finite(y) => Chart::Y(y),
        }
    }

    fn point(self) -> Point {
        match self {
            Chart::Y(y) => Point::Finite(y),
            Chart::W(w) if w == Complex64::new(0.0, 0.0) => Point::Infinity,
            Chart::W(w) => Point::Finite(w.inv()),
        }
    }

    fn value(self) -> Complex64 {
        match self {
            Chart::Y(v) | Chart::W(v) => v,
        }
    }

    fn with(self, v: Complex64) -> Chart {
        match self {
            Chart::Y(_) => Chart::Y(v),
            Chart::W(_) => Chart::W(v),
        }
    }

    fn rebalanced(self) -> Chart {
        match self {
            Chart::Y(y) if y.norm() > 2.0 => Chart::W(y.inv()),
            Chart::W(w) if w.norm() > 2.0 => Chart::Y(w.inv()),
            c => c,
        }
    }
}

/// Numeric form of `P(x, y) = Σ_j c_j(x) y^j` with the `x`-derivatives.
#[derive(Clone, Debug)]
pub struct Tracker {
    rows: Vec<Vec<Complex64>>,
    drows: Vec<Vec<Complex64>>,
    max_step: f64,
    /// Known branch points; a step never covers more than `branch_fraction`
    /// of the distance to the nearest one, so sheets cannot be swapped by
    /// stepping past a branch point.
    branch: Vec<Complex64>,
    branch_fraction: f64,
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

fn horner_d(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    c.iter()
        .rev()
        .fold((zero, zero), |(p, dp), a| (p * z + a, dp * z + p))
}

impl Tracker {
    pub fn new(p: &BiPoly) -> Tracker {
        let rows: Vec<Vec<Complex64>> = p.rows().iter().map(|r| r.to_complex()).collect();
        let drows = p.rows().iter().map(|r| r.derivative().to_complex()).collect();
        Tracker {
            rows,
            drows,
            max_step: 0.125,
            branch: Vec::new(),
            branch_fraction: 0.5,
        }
    }

    pub fn with_branch_points(mut self, branch: Vec<Complex64>) -> Tracker {
        self.branch = branch;
        self
    }

    /// Stricter copy used to re-run a loop whose endpoints were ambiguous.
    pub fn escalated(&self) -> Tracker {
        Tracker {
            max_step: 1.0 / 512.0,
            branch_fraction: 0.25,
            ..self.clone()
        }
    }

    pub fn degree_y(&self) -> usize {
        self.rows.len() - 1
    }

    /// `c_j(x)` for `j = 0..=d`.
    pub fn y_coeffs(&self, x: Complex64) -> Vec<Complex64> {
        self.rows.iter().map(|r| horner(r, x)).collect()
    }

    fn dy_coeffs(&self, x: Complex64) -> Vec<Complex64> {
        self.drows.iter().map(|r| horner(r, x)).collect()
    }

    /// Value and chart derivative of `P(x, ·)` at a chart point.
    fn eval_chart(c: &[Complex64], fp: Chart) -> (Complex64, Complex64) {
        match fp {
            Chart::Y(y) => horner_d(c, y),
            Chart::W(w) => {
                let rev: Vec<Complex64> = c.iter().rev().copied().collect();
                horner_d(&rev, w)
            }
        }
    }

    /// Newton in the point's chart. Near clustered roots the attainable
    /// accuracy is above `NEWTON_TOL`; a stagnating but tiny correction
    /// (below `floor`) is then accepted.
    fn newton(c: &[Complex64], start: Chart, floor: f64) -> Option<Chart> {
        let mut v = start.value();
        let mut last = f64::INFINITY;
        for k in 0..NEWTON_ITERS {
            let (f, df) = Self::eval_chart(c, start.with(v));
            if f == Complex64::new(0.0, 0.0) {
                return Some(start.with(v));
            }
            if df == Complex64::new(0.0, 0.0) {
                return None;
            }
            let delta = f / df;
            v -= delta;
            if !(v.re.is_finite() && v.im.is_finite()) || v.norm() > 1e3 {
                return None;
            }
            let size = delta.norm();
            if size <= NEWTON_TOL * v.norm().max(1.0) {
                return Some(start.with(v));
            }
            if k >= 1 && size > 0.5 * last {
                return (size < floor).then(|| start.with(v));
            }
            last = size;
        }
        (last < floor).then(|| start.with(v))
    }

    /// Continues `start` (a full fiber over `path.at(0)`) to the fiber over
    /// `path.at(1)`; the output keeps the input order.
    pub fn track(&self, path: &Path, start: &[Point], label: &str) -> Result<Vec<Point>> {
        let length = path.length();
        let mut pts: Vec<Chart> = start.iter().map(|p| Chart::from_point(*p)).collect();
        if length == 0.0 {
            return Ok(start.to_vec());
        }
        let fail = |reason: String| Error::Tracking {
            path: label.to_string(),
            reason,
        };
        let mut t = 0.0f64;
        let mut h = INITIAL_STEP.min(self.max_step);
        let mut streak = 0;
        let n = pts.len();
        while t < 1.0 {
            let x0 = path.at(t);
            let clearance = self
                .branch
                .iter()
                .map(|b| (x0 - b).norm())
                .fold(f64::INFINITY, f64::min);
            if clearance < MIN_CLEARANCE * x0.norm().max(1.0) {
                return Err(fail(format!("path meets a branch point at t = {t:.6}")));
            }
            let step = h.min(1.0 - t).min(self.branch_fraction * clearance / length);
            let x1 = path.at(t + step);
            let dx = x1 - x0;
            let c0 = self.y_coeffs(x0);
            let dc0 = self.dy_coeffs(x0);
            let c1 = self.y_coeffs(x1);
            let cur: Vec<Point> = pts.iter().map(|p| p.point()).collect();
            let mut ok = true;
            let mut next = Vec::with_capacity(n);
            for (i, fp) in pts.iter().enumerate() {
                let (_, fy) = Self::eval_chart(&c0, *fp);
                let (fx, _) = Self::eval_chart(&dc0, *fp);
                if fy == Complex64::new(0.0, 0.0) {
                    ok = false;
                    break;
                }
                let pred = fp.with(fp.value() - fx / fy * dx);
                let sep = cur
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i)
                    .map(|(_, q)| cur[i].chordal(q))
                    .fold(f64::INFINITY, f64::min);
                let pred_pt = pred.point();
                if cur[i].chordal(&pred_pt) > sep / 3.0 {
                    ok = false;
                    break;
                }
                let Some(corr) = Self::newton(&c1, pred, NEWTON_FLOOR * sep) else {
                    ok = false;
                    break;
                };
                if corr.point().chordal(&pred_pt) > sep / 4.0 {
                    ok = false;
                    break;
                }
                next.push(corr);
            }
            if ok {
                // Each corrected point must stay much closer to its own
                // start than to any other corrected point.
                let pts_next: Vec<Point> = next.iter().map(|p| p.point()).collect();
                'outer: for i in 0..n {
                    let moved = cur[i].chordal(&pts_next[i]);
                    for k in 0..n {
                        if k != i && pts_next[i].chordal(&pts_next[k]) < (3.0 * moved).max(1e-13) {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
            if !ok {
                h /= 2.0;
                streak = 0;
                if h * length < MIN_STEP * x0.norm().max(1.0) {
                    return Err(fail(format!("step underflow at t = {t:.6}")));
                }
                continue;
            }
            pts = next.into_iter().map(Chart::rebalanced).collect();
            t += step;
            streak += 1;
            if streak >= 4 {
                h = (h * 2.0).min(self.max_step);
                streak = 0;
            }
        }
        Ok(pts.into_iter().map(Chart::point).collect())
    }
}

/// `perm[i] = j` when `end[i]` is the start point `j`; `None` when some
/// endpoint is farther than `tol` from every start point, or the best and
/// second-best matches are within `tol` of each other.
pub fn match_fibers(end: &[Point], start: &[Point], tol: f64) -> Option<Vec<usize>> {
    let mut perm = Vec::with_capacity(end.len());
    let mut used = vec![false; start.len()];
    for e in end {
        let mut best = (f64::INFINITY, usize::MAX);
        let mut second = f64::INFINITY;
        for (j, s) in start.iter().enumerate() {
            let d = e.chordal(s);
            if d < best.0 {
                second = best.0;
                best = (d, j);
            } else if d < second {
                second = d;
            }
        }
        if best.0 > tol || second - best.0 < tol || used[best.1] {
            return None;
        }
        used[best.1] = true;
        perm.push(best.1);
    }
    Some(perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Field, Poly};

    fn tracker_for(num: &[i64], den: &[i64]) -> Tracker {
        let k = Field::rational();
        Tracker::new(&BiPoly::from_graph(&Poly::from_ints(&k, num), &Poly::from_ints(&k, den)))
    }

    #[test]
    fn square_root_swaps_around_zero() {
        // P(x, y) = x − y² has two sheets exchanged by a loop around 0.
        let k = Field::rational();
        let p = BiPoly::from_x(&Poly::x(&k)) - BiPoly::from_y(&Poly::from_ints(&k, &[0, 0, 1]));
        let t = Tracker::new(&p);
        let start = [Point::new(1.0, 0.0), Point::new(-1.0, 0.0)];
        let end = t
            .track(&Path::circle(Complex64::new(0.0, 0.0), 1.0, 0.0), &start, "circle")
            .unwrap();
        assert_eq!(match_fibers(&end, &start, 1e-6).unwrap(), vec![1, 0]);
    }

    #[test]
    fn passes_through_infinity() {
        // y = 1/x along a segment through small x: the sheet visits |y| ≫ 2.
        let k = Field::rational();
        let p = BiPoly::from_x(&Poly::x(&k)) * BiPoly::from_y(&Poly::x(&k)) - BiPoly::one(&k);
        let t = Tracker::new(&p);
        let from = Complex64::new(1.0, 0.001);
        let to = Complex64::new(-1.0, 0.001);
        let end = t.track(&Path::Segment { from, to }, &[Point::Finite(from.inv())], "seg").unwrap();
        let y = end[0].finite().unwrap();
        assert!((y - to.inv()).norm() < 1e-9);
    }

    #[test]
    fn cubic_fiber_is_continued() {
        let t = tracker_for(&[0, -3, 0, 1], &[1]);
        let x0 = Complex64::new(0.0, 3.0);
        let c = t.y_coeffs(x0);
        let start: Vec<Point> = crate::numeric::roots::roots(&c)
            .unwrap()
            .into_iter()
            .map(Point::Finite)
            .collect();
        let x1 = Complex64::new(0.5, 2.5);
        let end = t.track(&Path::Segment { from: x0, to: x1 }, &start, "seg").unwrap();
        for p in &end {
            let y = p.finite().unwrap();
            assert!(crate::numeric::roots::eval(&t.y_coeffs(x1), y).norm() < 1e-9);
        }
    }
}
