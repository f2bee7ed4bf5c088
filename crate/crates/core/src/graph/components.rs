//! Irreducible components of `V_G` from monodromy orbits: bidegrees,
//! ramification and genus.

use num_integer::Integer;
use rand::Rng as _;
use serde::Serialize;

use super::curve::GraphCurve;
use super::monodromy::{cycle_type, MonodromyAction};
use super::track::{match_fibers, Path};
use crate::arith::BiPoly;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::identities::Verdict;
use crate::numeric::Point;

const CROSSCHECK_DETOURS: usize = 12;

/// Local degree of `π₁∘π` at `(x, y)` when `G` has local degrees `e_x` at
/// `x` and `e_y` at `y`.
pub fn local_degree(ex: usize, ey: usize) -> usize {
    ey / ex.gcd(&ey)
}

/// Ramification of one component over one branch point.
#[derive(Clone, Debug, Serialize)]
pub struct BranchRamification {
    pub branch: usize,
    pub point: Point,
    /// Local degrees of `π₁` at the points above the branch point.
    pub partition: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentCertificate {
    /// Indices into the basepoint fiber.
    pub orbit: Vec<usize>,
    pub bidegree: (usize, usize),
    /// Only branch points with a nontrivial partition are listed.
    pub ramification: Vec<BranchRamification>,
    pub genus: usize,
    #[serde(skip)]
    pub exact_poly: Option<BiPoly>,
    pub is_diagonal: bool,
}

/// Cycle type of the loop permutation predicted from exact local degrees:
/// each `y` over the critical value contributes `gcd(e_x, e_y)` cycles of
/// length `e_y / gcd(e_x, e_y)`.
pub fn expected_cycle_type(curve: &GraphCurve, branch: usize) -> Vec<usize> {
    let b = &curve.branch_points[branch];
    let ex = b.local_degree;
    let mut out = Vec::new();
    for fp in &curve.value_fibers[b.value_index] {
        let g = ex.gcd(&fp.local_degree);
        out.extend(std::iter::repeat_n(local_degree(ex, fp.local_degree), g));
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Checks every loop permutation against the exact local degrees.
pub fn check_ramification(curve: &GraphCurve, action: &MonodromyAction) -> Result<()> {
    let all: Vec<usize> = (0..action.fiber.len()).collect();
    for (lp, perm) in action.loop_plan.iter().zip(&action.permutations) {
        let seen = cycle_type(perm, &all);
        let expect = expected_cycle_type(curve, lp.branch);
        if seen != expect {
            return Err(Error::Consistency(format!(
                "monodromy around branch point {} has cycle type {seen:?}, local degrees predict {expect:?}",
                curve.branch_points[lp.branch].point
            )));
        }
    }
    Ok(())
}

/// Cycle lengths of one loop permutation on a component, by loop index.
pub type LoopCycles = (usize, Vec<usize>);

/// Riemann–Hurwitz for `π₁` restricted to the component of `orbit`.
pub fn component_genus(action: &MonodromyAction, orbit: &[usize]) -> Result<(usize, Vec<LoopCycles>)> {
    let r = orbit.len() as i64;
    let mut total = 0i64;
    let mut profile = Vec::new();
    for (k, perm) in action.permutations.iter().enumerate() {
        let cycles = cycle_type(perm, orbit);
        let excess: usize = cycles.iter().map(|c| c - 1).sum();
        if excess > 0 {
            profile.push((k, cycles));
        }
        total += excess as i64;
    }
    let twice = total - 2 * r + 2;
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::Consistency(format!(
            "Riemann-Hurwitz gives genus {}/2 for a component of degree {r}",
            twice
        )));
    }
    Ok(((twice / 2) as usize, profile))
}

/// Size of the orbit containing the basepoint in the fiber over `y_j`, i.e.
/// the degree of the second projection on the component through
/// `(x0, y_j)`. Tracks the whole fiber from `x0` to `y_j`, detouring through
/// random midpoints when a straight path fails.
pub fn second_projection_degree(
    curve: &GraphCurve,
    action: &MonodromyAction,
    j: usize,
    config: &RunConfig,
) -> Result<usize> {
    let x0 = curve.basepoint;
    let target = curve.fiber[j].finite().ok_or_else(|| {
        Error::Consistency("basepoint fiber contains ∞ in the working chart".into())
    })?;
    let mut rng = config.rng("graph.crosscheck");
    let label = format!("cross-check path to fiber point {j}");
    let mut last = None;
    for attempt in 0..=CROSSCHECK_DETOURS {
        let route: Vec<Path> = if attempt == 0 {
            vec![Path::Segment { from: x0, to: target }]
        } else {
            let mid = curve.base_center
                + num_complex::Complex64::from_polar(
                    curve.base_radius * rng.gen_range(0.2..1.2),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
            vec![
                Path::Segment { from: x0, to: mid },
                Path::Segment { from: mid, to: target },
            ]
        };
        let mut pts = curve.fiber.clone();
        let mut ok = true;
        for path in &route {
            match curve.tracker.track(path, &pts, &label) {
                Ok(p) => pts = p,
                Err(e) => {
                    last = Some(e);
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let home = Point::Finite(x0);
        let Some(k) = match_fibers(&[home], &pts, config.fiber_match_tol).map(|m| m[0]) else {
            last = Some(Error::Tracking {
                path: label.clone(),
                reason: "basepoint not found in the continued fiber".into(),
            });
            continue;
        };
        let orbits = action.orbits();
        let orbit = orbits.iter().find(|o| o.contains(&k)).expect("orbits cover the fiber");
        return Ok(orbit.len());
    }
    Err(last.unwrap_or_else(|| Error::Tracking {
        path: label,
        reason: "no detour succeeded".into(),
    }))
}

/// Components from the monodromy orbits, with genus and a cross-checked
/// second projection degree.
pub fn components(curve: &GraphCurve, action: &MonodromyAction, config: &RunConfig) -> Result<Vec<ComponentCertificate>> {
    check_ramification(curve, action)?;
    let orbits = action.orbits();
    let mut out = Vec::with_capacity(orbits.len());
    for orbit in orbits {
        let r = orbit.len();
        let is_diagonal = orbit.contains(&0);
        if is_diagonal && r != 1 {
            return Err(Error::Consistency(format!(
                "the diagonal shares its monodromy orbit with {} other fiber points",
                r - 1
            )));
        }
        let r2 = if is_diagonal {
            1
        } else {
            second_projection_degree(curve, action, orbit[0], config)?
        };
        if r2 != r {
            return Err(Error::Consistency(format!(
                "component through fiber point {} has bidegree ({r}, {r2})",
                orbit[0]
            )));
        }
        let (genus, profile) = component_genus(action, &orbit)?;
        let ramification = profile
            .into_iter()
            .map(|(k, partition)| {
                let branch = action.loop_plan[k].branch;
                BranchRamification {
                    branch,
                    point: curve.branch_points[branch].point,
                    partition,
                }
            })
            .collect();
        out.push(ComponentCertificate {
            orbit,
            bidegree: (r, r2),
            ramification,
            genus,
            exact_poly: is_diagonal.then(|| BiPoly::x_minus_y(curve.g.field())),
            is_diagonal,
        });
    }
    Ok(out)
}

/// PASS when the component has genus 0, so a degree-`r` rational
/// parametrization exists; the parametrization itself is not constructed.
pub fn genus_zero_parametrization_check(cert: &ComponentCertificate) -> Verdict {
    Verdict::from_bool(cert.genus == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_degrees() {
        assert_eq!(local_degree(1, 2), 2);
        assert_eq!(local_degree(3, 3), 1);
        assert_eq!(local_degree(2, 3), 3);
        assert_eq!(local_degree(2, 4), 2);
    }
}
