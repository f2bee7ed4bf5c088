//! Monodromy of the projection `(x, y) ↦ x` on `V_G` around each branch point.

use num_complex::Complex64;
use serde::Serialize;

use super::components::expected_cycle_type;
use super::curve::GraphCurve;
use super::track::{match_fibers, Path, Tracker};
use crate::error::{Error, Result};
use crate::numeric::Point;

/// Segment out to the small circle, one counterclockwise turn, and back.
#[derive(Clone, Debug, Serialize)]
pub struct Loop {
    /// Index into [`GraphCurve::branch_points`].
    pub branch: usize,
    #[serde(serialize_with = "ser_complex")]
    pub center: Complex64,
    pub radius: f64,
    /// False when the exact local degrees force the identity (every point
    /// above is unramified for `π₁`); such loops are not tracked.
    pub tracked: bool,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Point::Finite(*z).serialize(s)
}

impl Loop {
    fn paths(&self, x0: Complex64) -> [Path; 3] {
        let dir = (x0 - self.center) / (x0 - self.center).norm();
        let touch = self.center + dir * self.radius;
        [
            Path::Segment { from: x0, to: touch },
            Path::circle(self.center, self.radius, dir.arg()),
            Path::Segment { from: touch, to: x0 },
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyAction {
    pub fiber: Vec<Point>,
    /// `permutations[k][i] = j`: continuing fiber point `i` around loop `k`
    /// ends at fiber point `j`.
    pub permutations: Vec<Vec<usize>>,
    pub loop_plan: Vec<Loop>,
}

/// `first` then `second`.
pub fn then(first: &[usize], second: &[usize]) -> Vec<usize> {
    first.iter().map(|&j| second[j]).collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &j)| i == j)
}

/// Loops in counterclockwise order as seen from the basepoint.
pub fn loop_plan(curve: &GraphCurve) -> Vec<Loop> {
    let x0 = curve.basepoint;
    let reference = curve.base_center - x0;
    let bs: Vec<Complex64> = curve.branch_points.iter().map(|b| b.chart_point).collect();
    let mut order: Vec<usize> = (0..bs.len()).collect();
    let key = |i: usize| (((bs[i] - x0) / reference).arg(), (bs[i] - x0).norm());
    order.sort_by(|&a, &b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    order
        .into_iter()
        .map(|i| {
            let nearest = bs
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, b)| (b - bs[i]).norm())
                .fold(f64::INFINITY, f64::min);
            Loop {
                branch: i,
                center: bs[i],
                radius: (nearest / 3.0).min((x0 - bs[i]).norm() / 3.0),
                tracked: expected_cycle_type(curve, i).iter().any(|&c| c > 1),
            }
        })
        .collect()
}

fn run_loop(tracker: &Tracker, lp: &Loop, x0: Complex64, fiber: &[Point], tol: f64) -> Result<Option<Vec<usize>>> {
    let label = format!("loop around branch point {}", lp.branch);
    let mut pts = fiber.to_vec();
    for (path, piece) in lp.paths(x0).iter().zip(["outbound segment", "circle", "return segment"]) {
        pts = tracker.track(path, &pts, &format!("{label} ({piece})"))?;
    }
    Ok(match_fibers(&pts, fiber, tol))
}

/// The permutation of one loop; `None` when the endpoint matching is
/// ambiguous.
pub fn loop_permutation(curve: &GraphCurve, lp: &Loop, escalated: bool, match_tol: f64) -> Result<Option<Vec<usize>>> {
    let tracker = if escalated {
        curve.tracker.escalated()
    } else {
        curve.tracker.clone()
    };
    run_loop(&tracker, lp, curve.basepoint, &curve.fiber, match_tol)
}

/// Tracks the basepoint fiber around every loop. A tracking failure or an
/// ambiguous endpoint matching is retried once with a smaller maximal step.
pub fn monodromy(curve: &GraphCurve, match_tol: f64) -> Result<MonodromyAction> {
    let plan = loop_plan(curve);
    let mut permutations = Vec::with_capacity(plan.len());
    for lp in &plan {
        if !lp.tracked {
            permutations.push((0..curve.fiber.len()).collect());
            continue;
        }
        let perm = match run_loop(&curve.tracker, lp, curve.basepoint, &curve.fiber, match_tol) {
            Ok(Some(p)) => p,
            Ok(None) | Err(Error::Tracking { .. }) => run_loop(&curve.tracker.escalated(), lp, curve.basepoint, &curve.fiber, match_tol)?
                .ok_or_else(|| Error::Tracking {
                    path: format!("loop around branch point {}", lp.branch),
                    reason: "endpoint matching stays ambiguous after precision escalation".into(),
                })?,
            Err(e) => return Err(e),
        };
        permutations.push(perm);
    }
    Ok(MonodromyAction {
        fiber: curve.fiber.clone(),
        permutations,
        loop_plan: plan,
    })
}

impl MonodromyAction {
    /// Product of the loop permutations in loop order.
    pub fn product(&self) -> Vec<usize> {
        self.permutations
            .iter()
            .fold((0..self.fiber.len()).collect(), |acc: Vec<usize>, p| then(&acc, p))
    }

    pub fn sphere_relation_holds(&self) -> bool {
        is_identity(&self.product())
    }

    /// Orbits of the generated group, sorted by smallest element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.fiber.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for p in &self.permutations {
            for (i, &j) in p.iter().enumerate() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        let mut root_of = vec![usize::MAX; n];
        for i in 0..n {
            let r = find(&mut parent, i);
            if root_of[r] == usize::MAX {
                root_of[r] = orbits.len();
                orbits.push(Vec::new());
            }
            orbits[root_of[r]].push(i);
        }
        orbits
    }
}

/// Cycle lengths of `p` restricted to `subset`, sorted descending.
pub fn cycle_type(p: &[usize], subset: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for &i in subset {
        if seen[i] {
            continue;
        }
        let mut len = 0;
        let mut k = i;
        while !seen[k] {
            seen[k] = true;
            k = p[k];
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_order() {
        let a = vec![1, 0, 2];
        let b = vec![0, 2, 1];
        // 0 → 1 → 2
        assert_eq!(then(&a, &b), vec![2, 0, 1]);
        assert!(is_identity(&then(&a, &a)));
    }

    #[test]
    fn cycles() {
        assert_eq!(cycle_type(&[1, 2, 0, 4, 3, 5], &[0, 1, 2, 3, 4, 5]), vec![3, 2, 1]);
        assert_eq!(cycle_type(&[1, 0, 2], &[0, 1]), vec![2]);
    }
}
