//! The graph curve `V_G`, its irreducible components via numerical
//! monodromy, and exact certification of the component polynomials.

pub mod components;
pub mod curve;
pub mod monodromy;
pub mod reconstruct;
pub mod track;

use serde_json::{json, Value};

pub use components::{components, genus_zero_parametrization_check, local_degree, ComponentCertificate};
pub use curve::{build_graph, fiber_at, GraphCurve};
pub use monodromy::{monodromy, MonodromyAction};
pub use reconstruct::{reconstruct_component, ReconstructFailure};

use crate::arith::BiPoly;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::io::json::{bipoly_to_value, map_to_value, moebius_to_value, point_to_value};
use crate::map::RationalMap;

#[derive(Clone, Debug)]
pub struct GraphAnalysis {
    pub curve: GraphCurve,
    pub monodromy: MonodromyAction,
    pub components: Vec<ComponentCertificate>,
    /// Reconstruction failures, by component index.
    pub reconstruction_failures: Vec<(usize, ReconstructFailure)>,
}

/// Builds the curve, runs monodromy, assembles component certificates and
/// tries to certify each component exactly. Any failure of the sphere
/// relation, of Riemann–Hurwitz integrality, of the exact ramification
/// profile or of the `r1 = r2` cross-check is an [`Error::Consistency`].
pub fn analyze_graph(g: &RationalMap, config: &RunConfig) -> Result<GraphAnalysis> {
    config.validate()?;
    let curve = build_graph(g, config)?;
    let action = monodromy(&curve, config.fiber_match_tol)?;
    if !action.sphere_relation_holds() {
        return Err(Error::Consistency(format!(
            "sphere relation fails: loop product is {:?}",
            action.product()
        )));
    }
    let mut comps = components(&curve, &action, config)?;
    let total: usize = comps.iter().map(|c| c.bidegree.0).sum();
    if total != g.degree() {
        return Err(Error::Consistency(format!(
            "component degrees sum to {total}, not {}",
            g.degree()
        )));
    }
    let mut failures = Vec::new();
    for (i, c) in comps.iter_mut().enumerate() {
        match reconstruct_component(&curve, c) {
            Ok(p) => c.exact_poly = Some(p),
            Err(e) => failures.push((i, e)),
        }
    }
    if let [(i, _)] = failures[..] {
        // The one missing factor is the exact quotient by all the others.
        let known = comps
            .iter()
            .filter_map(|c| c.exact_poly.as_ref())
            .fold(BiPoly::one(g.field()), |acc, f| &acc * f);
        let r = comps[i].bidegree.0;
        if let Some(q) = curve.p.divide_exact(&known) {
            let q = reconstruct::clear_denominators(&q.normalized());
            if q.bidegree() == (r, r) {
                comps[i].exact_poly = Some(q);
                failures.clear();
            }
        }
    }
    if failures.is_empty() {
        check_factorization(&curve.p, &comps)?;
    }
    Ok(GraphAnalysis {
        curve,
        monodromy: action,
        components: comps,
        reconstruction_failures: failures,
    })
}

/// The product of all exact factors must be `P` up to a constant.
fn check_factorization(p: &BiPoly, comps: &[ComponentCertificate]) -> Result<()> {
    let product = comps
        .iter()
        .filter_map(|c| c.exact_poly.as_ref())
        .fold(BiPoly::one(p.field()), |acc, f| &acc * f);
    if product.normalized() != p.normalized() {
        return Err(Error::Consistency(
            "exact component factors do not multiply to the graph polynomial".into(),
        ));
    }
    Ok(())
}

impl GraphAnalysis {
    pub fn to_value(&self, config: &RunConfig) -> Value {
        let comps: Vec<Value> = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut v = json!({
                    "bidegree": [c.bidegree.0, c.bidegree.1],
                    "genus": c.genus,
                    "is_diagonal": c.is_diagonal,
                    "orbit": c.orbit,
                    "ramification": c.ramification.iter().map(|r| json!({
                        "branch_point": point_to_value(&r.point),
                        "partition": r.partition,
                    })).collect::<Vec<_>>(),
                    "genus_zero_parametrization": genus_zero_parametrization_check(c),
                });
                match &c.exact_poly {
                    Some(p) => v["exact_poly"] = bipoly_to_value(p),
                    None => {
                        let why = self
                            .reconstruction_failures
                            .iter()
                            .find(|(k, _)| *k == i)
                            .map(|(_, e)| e.to_string());
                        v["reconstruction_failure"] = json!(why);
                    }
                }
                v
            })
            .collect();
        let curve = &self.curve;
        json!({
            "map": map_to_value(&curve.g),
            "degree": curve.g.degree(),
            "graph_poly": bipoly_to_value(&curve.p),
            "branch_points": curve
                .branch_points
                .iter()
                .map(|b| json!({
                    "point": point_to_value(&b.point),
                    "local_degree": b.local_degree,
                    "looped": true,
                }))
                .chain(curve.omitted_infinity.map(|(_, e)| json!({
                    "point": point_to_value(&crate::numeric::Point::Infinity),
                    "local_degree": e,
                    "looped": false,
                })))
                .collect::<Vec<_>>(),
            "chart": moebius_to_value(&curve.chart),
            "basepoint": point_to_value(&crate::numeric::Point::Finite(curve.basepoint)),
            "sphere_relation": self.monodromy.sphere_relation_holds(),
            "permutations": self.monodromy.permutations,
            "components": comps,
            "seed": config.seed,
            "config": config,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Field, Poly};

    fn cheb() -> RationalMap {
        RationalMap::from_ints(&Field::rational(), &[0, -3, 0, 1], &[1]).unwrap()
    }

    #[test]
    fn chebyshev_components() {
        let a = analyze_graph(&cheb(), &RunConfig::default()).unwrap();
        let mut bideg: Vec<_> = a.components.iter().map(|c| (c.bidegree, c.genus)).collect();
        bideg.sort();
        assert_eq!(bideg, vec![((1, 1), 0), ((2, 2), 0)]);
        let k = Field::rational();
        let quad = BiPoly::from_x(&Poly::from_ints(&k, &[-3, 0, 1]))
            + &BiPoly::from_x(&Poly::x(&k)) * &BiPoly::from_y(&Poly::x(&k))
            + BiPoly::from_y(&Poly::from_ints(&k, &[0, 0, 1]));
        let found: Vec<_> = a.components.iter().map(|c| c.exact_poly.clone().unwrap().normalized()).collect();
        assert!(found.contains(&quad.normalized()));
        assert!(found.contains(&BiPoly::x_minus_y(&k).normalized()));
    }

    #[test]
    fn power_maps_split_into_rotations() {
        for d in 2..=5 {
            let g = RationalMap::power(&Field::rational(), d).unwrap();
            let a = analyze_graph(&g, &RunConfig::default()).unwrap();
            assert_eq!(a.components.len(), d, "z^{d}");
            assert!(a.components.iter().all(|c| c.bidegree == (1, 1) && c.genus == 0));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = RunConfig::with_seed(9);
        let a = analyze_graph(&cheb(), &cfg).unwrap().to_value(&cfg);
        let b = analyze_graph(&cheb(), &cfg).unwrap().to_value(&cfg);
        assert_eq!(a, b);
    }
}
