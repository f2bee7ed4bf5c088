use equimeasure::arith::rational::ratio;
use equimeasure::arith::Field;
use equimeasure::catalog::{self, default_params, entry, run_entry, Params};
use equimeasure::config::{stream_rng, RunConfig};
use equimeasure::identities::{
    check_counterexample_triple, check_main1_relations, mobius_factor_exists, shared_iterate_search, Verdict,
};
use equimeasure::map::RationalMap;

fn rational(num: &[i64], den: &[i64]) -> RationalMap {
    RationalMap::from_ints(&Field::rational(), num, den).unwrap()
}

#[test]
fn every_default_catalog_sample_matches_its_expectations() {
    let config = RunConfig::default();
    for name in catalog::NAMES {
        for params in default_params(name).unwrap() {
            let run = run_entry(&entry(&params).unwrap(), &config).unwrap();
            assert!(run.matches_expected, "{name} {}: {:?}", run.params, run.report.claims);
        }
    }
}

#[test]
fn flower_family_certificates() {
    let k = Field::eisenstein();
    for a in [k.one(), k.from_int(2), &k.one() + &k.generator()] {
        let e = entry(&Params::ChebyshevFlower { a }).unwrap();
        let (r, s, t) = (e.map("R").unwrap(), e.map("S").unwrap(), e.map("T").unwrap());
        let report = check_counterexample_triple(r, s, t, &mut stream_rng(1, "identities.fiber")).unwrap();
        assert!(!report.any_fail(), "{:?}", report.claims);
        assert_eq!(e.map("f").unwrap().degree(), 6);
    }
}

#[test]
fn zieve_square_case_has_a_moebius_factor() {
    // R = (1 − z²)/(z⁴ − 1) = −1/(z² + 1) and S = z²(1 − z²)/(z⁴ − 1), so
    // S = −1 − R.
    let e = entry(&Params::Zieve { n: 2, m: 2 }).unwrap();
    let (r, s) = (e.map("R").unwrap(), e.map("S").unwrap());
    let expected_r = rational(&[-1], &[1, 0, 1]);
    assert_eq!(r, &expected_r);
    let minus_one_minus = rational(&[-1, -1], &[1]);
    assert_eq!(s, &minus_one_minus.compose(r).unwrap());
    let found = mobius_factor_exists(r, s, &mut stream_rng(4, "identities.fiber")).unwrap();
    assert!(found.sigma.is_some());
}

#[test]
fn zieve_asymmetric_cases_pass() {
    for (n, m) in [(2, 1), (1, 2), (3, 1)] {
        let e = entry(&Params::Zieve { n, m }).unwrap();
        let run = run_entry(&e, &RunConfig::default()).unwrap();
        assert!(!run.report.any_fail(), "({n},{m}): {:?}", run.report.claims);
    }
}

#[test]
fn invalid_catalog_parameters_are_rejected() {
    let k = Field::eisenstein();
    assert!(entry(&Params::ChebyshevFlower { a: k.zero() }).is_err());
    assert!(entry(&Params::Zieve { n: 0, m: 1 }).is_err());
    assert!(default_params("nope").is_err());
}

#[test]
fn common_relations_for_maps_with_a_shared_iterate() {
    let z2 = RationalMap::power(&Field::rational(), 2).unwrap();
    let z4 = RationalMap::power(&Field::rational(), 4).unwrap();
    let report = check_main1_relations(&z2.compose(&z2).unwrap(), &z4).unwrap();
    assert!(!report.any_fail());
    let report = check_main1_relations(&z2, &rational(&[1, 0, 1], &[1])).unwrap();
    assert_eq!(report.verdict("F∘F = F∘G"), Some(Verdict::Fail));
}

#[test]
fn shared_iterates() {
    let mut rng = stream_rng(8, "tests.iterates");
    for _ in 0..4 {
        let f = RationalMap::random(&mut rng, 2, 4, 3, false);
        let f3 = f.iterate(3, 4096).unwrap();
        assert_eq!(shared_iterate_search(&f, &f3, 64).unwrap(), Some((3, 1)));
        let f2 = f.iterate(2, 4096).unwrap();
        assert_eq!(shared_iterate_search(&f2, &f3, 64).unwrap(), Some((3, 2)));
    }
    let e = entry(&Params::ChebyshevFlower { a: Field::eisenstein().one() }).unwrap();
    let (f, g) = (e.map("f").unwrap(), e.map("g").unwrap());
    assert_eq!(shared_iterate_search(f, g, 6u128.pow(4)).unwrap(), None);
}

#[test]
fn quadratic_sigma_entry_builds_sigma_f() {
    let f = RationalMap::from_ints(&Field::rational(), &[1, 0, 2], &[0, -1, 1]).unwrap();
    let e = entry(&Params::QuadraticSigma { f: f.clone() }).unwrap();
    let sigma = e.map("sigma_f").unwrap();
    assert_eq!(f.compose(sigma).unwrap(), f);
    let half = Field::rational().from_rational(ratio(1, 2));
    assert_eq!(f.eval_exact(&equimeasure::map::ExactPoint::Finite(half.clone())), f.eval_exact(&sigma.eval_exact(&equimeasure::map::ExactPoint::Finite(half))));
}
