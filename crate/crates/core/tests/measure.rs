use equimeasure::arith::Field;
use equimeasure::catalog::{entry, Params};
use equimeasure::measure::energy::verdict;
use equimeasure::measure::{backward_orbit_sample, julia_raster, measure_distance, same_measure_test, MeasureVerdict, Window};
use equimeasure::map::RationalMap;

fn z2_plus(c: i64) -> RationalMap {
    RationalMap::from_ints(&Field::rational(), &[c, 0, 1], &[1]).unwrap()
}

#[test]
fn unit_circle_cloud_for_the_square_map() {
    let cloud = backward_orbit_sample(&z2_plus(0), 2000, 30, 4, "t").unwrap();
    assert_eq!(cloud.len(), 2000);
    for p in &cloud.points {
        // The unit circle is the equator; after 30 square roots a start
        // point z sits about |log|z||/2^30 off it.
        assert!(p[2].abs() < 1e-6, "{p:?}");
    }
}

#[test]
fn clouds_are_deterministic_per_seed_and_tag() {
    let f = z2_plus(-1);
    let a = backward_orbit_sample(&f, 500, 20, 9, "x").unwrap();
    let b = backward_orbit_sample(&f, 500, 20, 9, "x").unwrap();
    let c = backward_orbit_sample(&f, 500, 20, 9, "y").unwrap();
    assert_eq!(a.points, b.points);
    assert_ne!(a.points, c.points);
}

#[test]
fn flower_pair_shares_its_measure_and_basilica_does_not() {
    let e = entry(&Params::ChebyshevFlower { a: Field::eisenstein().one() }).unwrap();
    let (f, g) = (e.map("f").unwrap(), e.map("g").unwrap());
    let same = same_measure_test(f, g, 4000, 30, 2).unwrap();
    assert_eq!(same.verdict, MeasureVerdict::Same, "{same:?}");
    let diff = same_measure_test(&z2_plus(0), &z2_plus(-1), 8000, 30, 2).unwrap();
    assert_eq!(diff.verdict, MeasureVerdict::Different, "{diff:?}");
}

#[test]
fn the_measure_is_forward_invariant() {
    let f = z2_plus(-1);
    let a = backward_orbit_sample(&f, 4000, 30, 3, "a").unwrap();
    let b = backward_orbit_sample(&f, 4000, 30, 3, "b").unwrap();
    let baseline = measure_distance(&a, &b).unwrap();
    let pushed = measure_distance(&a.push_forward(&f), &b).unwrap();
    assert_eq!(verdict(pushed, baseline), MeasureVerdict::Same, "{pushed} vs {baseline}");
}

#[test]
fn depth_stabilizes() {
    let f = RationalMap::from_ints(&Field::rational(), &[1, 0, 2], &[0, -1, 1]).unwrap();
    let shallow = backward_orbit_sample(&f, 3000, 20, 5, "a").unwrap();
    let deep = backward_orbit_sample(&f, 3000, 40, 5, "b").unwrap();
    let other = backward_orbit_sample(&f, 3000, 40, 5, "c").unwrap();
    let baseline = measure_distance(&deep, &other).unwrap();
    let d = measure_distance(&shallow, &deep).unwrap();
    assert_eq!(verdict(d, baseline), MeasureVerdict::Same, "{d} vs {baseline}");
}

#[test]
fn raster_of_the_square_map_lights_the_circle() {
    let r = julia_raster(&z2_plus(0), 64, 64, Window::square(1.5), 1000, 30, 10, 1).unwrap();
    let lit = r.lit_fraction();
    assert!(lit > 0.02 && lit < 0.3, "{lit}");
    let again = julia_raster(&z2_plus(0), 64, 64, Window::square(1.5), 1000, 30, 10, 1).unwrap();
    assert_eq!(r.to_ppm(), again.to_ppm());
    let ppm = r.to_ppm();
    assert!(ppm.starts_with(b"P6\n64 64\n255\n"));
    assert_eq!(ppm.len(), b"P6\n64 64\n255\n".len() + 64 * 64 * 3);
    // The centre pixel lies off the circle.
    assert_eq!(r.counts[32 * 64 + 32], 0);
}
