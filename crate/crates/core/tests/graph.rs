use equimeasure::arith::{BiPoly, Field, Poly};
use equimeasure::config::{stream_rng, RunConfig};
use equimeasure::graph::{analyze_graph, GraphAnalysis};
use equimeasure::identities::sigma_f_quadratic;
use equimeasure::map::{critical_data, RationalMap};

fn x(k: &Field) -> BiPoly {
    BiPoly::from_x(&Poly::x(k))
}

fn y(k: &Field) -> BiPoly {
    BiPoly::from_y(&Poly::x(k))
}

fn c(k: &Field, n: i64) -> BiPoly {
    BiPoly::from_x(&Poly::constant(k.from_int(n)))
}

fn factors(a: &GraphAnalysis) -> Vec<BiPoly> {
    a.components
        .iter()
        .filter_map(|c| c.exact_poly.as_ref().map(BiPoly::normalized))
        .collect()
}

fn sorted_bidegrees(a: &GraphAnalysis) -> Vec<((usize, usize), usize)> {
    let mut v: Vec<_> = a.components.iter().map(|c| (c.bidegree, c.genus)).collect();
    v.sort();
    v
}

#[test]
fn chebyshev_cubic_splits_into_diagonal_and_conic() {
    let k = Field::rational();
    let t = RationalMap::from_ints(&k, &[0, -3, 0, 1], &[1]).unwrap();
    let a = analyze_graph(&t, &RunConfig::default()).unwrap();
    assert_eq!(sorted_bidegrees(&a), vec![((1, 1), 0), ((2, 2), 0)]);

    // Oracle: x³ − 3x − (y³ − 3y) = (x − y)(x² + xy + y² − 3).
    let conic = &(&x(&k) * &x(&k)) + &(&x(&k) * &y(&k));
    let conic = &(&conic + &(&y(&k) * &y(&k))) - &c(&k, 3);
    let found = factors(&a);
    assert!(found.contains(&conic.normalized()));
    assert!(found.contains(&BiPoly::x_minus_y(&k).normalized()));
    let product = &BiPoly::x_minus_y(&k) * &conic;
    assert_eq!(product.normalized(), a.curve.p.normalized());
    assert!(a.reconstruction_failures.is_empty());
}

#[test]
fn power_maps_give_rotation_lines() {
    let k = Field::rational();
    for d in 2..=6 {
        let g = RationalMap::power(&k, d).unwrap();
        let a = analyze_graph(&g, &RunConfig::with_seed(d as u64)).unwrap();
        assert_eq!(a.components.len(), d, "z^{d}");
        assert!(a.components.iter().all(|c| c.bidegree == (1, 1) && c.genus == 0));
        assert!(a.monodromy.sphere_relation_holds());
    }
    // Over Q only z^2 has all lines x − ζy rational: x − y and x + y.
    let a = analyze_graph(&RationalMap::power(&k, 2).unwrap(), &RunConfig::default()).unwrap();
    let plus = &x(&k) + &y(&k);
    assert!(factors(&a).contains(&plus.normalized()));
}

#[test]
fn chebyshev_cubic_over_eisenstein_field() {
    let k = Field::eisenstein();
    let t = RationalMap::from_ints(&k, &[0, -3, 0, 1], &[1]).unwrap();
    let a = analyze_graph(&t, &RunConfig::with_seed(3)).unwrap();
    assert_eq!(sorted_bidegrees(&a), vec![((1, 1), 0), ((2, 2), 0)]);
    assert!(a.reconstruction_failures.is_empty());
}

#[test]
fn random_maps_have_consistent_components() {
    let mut rng = stream_rng(2024, "tests.graph.random");
    for i in 0..12 {
        let d = 2 + i % 4;
        let g = RationalMap::random(&mut rng, d, 5, 4, i % 3 == 0);
        let a = analyze_graph(&g, &RunConfig::with_seed(i as u64)).unwrap_or_else(|e| panic!("{g}: {e}"));
        let total: usize = a.components.iter().map(|c| c.bidegree.0).sum();
        assert_eq!(total, d, "{g}");
        assert_eq!(a.components.iter().filter(|c| c.is_diagonal).count(), 1);
        for comp in &a.components {
            let r = comp.bidegree.0;
            assert_eq!(comp.bidegree.1, r);
            // A curve of bidegree (r, r) has arithmetic genus (r − 1)².
            assert!(comp.genus <= (r - 1) * (r - 1), "{g}: genus {} for r = {r}", comp.genus);
        }
        if a.reconstruction_failures.is_empty() {
            let product = factors(&a).iter().fold(BiPoly::one(g.field()), |acc, f| &acc * f);
            assert_eq!(product.normalized(), a.curve.p.normalized());
        }
    }
}

#[test]
fn three_simple_critical_values_force_positive_genus() {
    let mut rng = stream_rng(77, "tests.graph.genus");
    let mut checked = 0;
    while checked < 6 {
        let d = 3 + checked % 3;
        let g = RationalMap::random(&mut rng, d, 4, 3, false);
        if critical_data(&g).unwrap().simple_value_count() < 3 {
            continue;
        }
        let a = analyze_graph(&g, &RunConfig::with_seed(checked as u64)).unwrap();
        for comp in a.components.iter().filter(|c| c.bidegree.0 >= 2) {
            let r = comp.bidegree.0;
            assert!(comp.genus >= 1 && 2 * comp.genus >= r - 1, "{g}: r = {r}, genus {}", comp.genus);
        }
        checked += 1;
    }
}

#[test]
fn second_iterate_of_a_quadratic() {
    let k = Field::rational();
    let mut rng = stream_rng(5, "tests.graph.quadratic");
    for i in 0..3 {
        let g = RationalMap::random(&mut rng, 2, 5, 3, false);
        let big = g.compose(&g).unwrap();
        let a = analyze_graph(&big, &RunConfig::with_seed(i)).unwrap();
        let sigma = sigma_f_quadratic(&g).unwrap();
        let [p, q, r, s] = sigma.entries().map(Clone::clone);
        // y = (p x + q)/(r x + s), cleared: (r x + s) y − (p x + q).
        let line = |e: &equimeasure::arith::FieldElement| BiPoly::from_x(&Poly::constant(e.clone()));
        let graph = &(&(&line(&r) * &x(&k)) + &line(&s)) * &y(&k);
        let graph = &graph - &(&(&line(&p) * &x(&k)) + &line(&q));
        assert!(factors(&a).contains(&graph.normalized()), "{g}");
        let mut lines = 0;
        for comp in &a.components {
            if comp.bidegree == (1, 1) {
                lines += 1;
            } else {
                assert!(comp.genus >= 1, "{g}: component {:?} has genus 0", comp.bidegree);
            }
        }
        assert_eq!(lines, 2, "{g}");
    }
}

#[test]
fn reports_are_deterministic() {
    let k = Field::rational();
    let g = RationalMap::from_ints(&k, &[1, 0, 2], &[0, -1, 1]).unwrap();
    let cfg = RunConfig::with_seed(11);
    let a = analyze_graph(&g, &cfg).unwrap().to_value(&cfg);
    let b = analyze_graph(&g, &cfg).unwrap().to_value(&cfg);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a["seed"], 11);
}
