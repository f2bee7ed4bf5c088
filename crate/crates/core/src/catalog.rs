//! Exactly constructed example families with their expected certificates.

use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::rational::ratio;
use crate::arith::{Field, FieldElement, Poly};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::identities::{
    check_counterexample_triple, check_main1_relations, equality_witness, shared_iterate_search,
    sigma_f_quadratic, CertificateReport, Verdict,
};
use crate::io::json::{element_to_value, field_to_value, map_to_value, moebius_to_value};
use crate::map::RationalMap;

pub const NAMES: [&str; 4] = ["chebyshev-flower", "zieve-family", "power-map", "quadratic-sigma"];

pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "chebyshev-flower" => "T = z^3-3z, R = az+1/(az), S = awz+1/(awz) over Q(w), w^2+w+1 = 0",
        "zieve-family" => "T = z^n(z+1)^m, R = (1-z^n)/(z^(n+m)-1), S = z^m(1-z^n)/(z^(n+m)-1)",
        "power-map" => "f = z^d and g = z^(d^2), which share the iterate f^2 = g",
        "quadratic-sigma" => "a quadratic f paired with g = sigma_f o f",
        _ => return None,
    })
}

#[derive(Clone, Debug)]
pub enum Params {
    ChebyshevFlower { a: FieldElement },
    Zieve { n: u32, m: u32 },
    PowerMap { d: usize },
    QuadraticSigma { f: RationalMap },
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Value,
    pub field: Field,
    pub maps: Vec<(String, RationalMap)>,
    pub expected: Vec<(String, Verdict)>,
    params_raw: Params,
}

impl CatalogEntry {
    pub fn map(&self, name: &str) -> Option<&RationalMap> {
        self.maps.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryRun {
    pub entry: String,
    pub params: Value,
    pub field: Value,
    pub maps: Value,
    pub report: CertificateReport,
    pub expected: Vec<(String, Verdict)>,
    pub matches_expected: bool,
}

/// The parameters `run_default` checks: for the flower family the samples
/// `a ∈ {1, 2, 1/2, 1+ω}`.
pub fn default_params(name: &str) -> Result<Vec<Params>> {
    let k = Field::eisenstein();
    Ok(match name {
        "chebyshev-flower" => vec![
            k.one(),
            k.from_int(2),
            k.from_rational(ratio(1, 2)),
            &k.one() + &k.generator(),
        ]
        .into_iter()
        .map(|a| Params::ChebyshevFlower { a })
        .collect(),
        "zieve-family" => vec![Params::Zieve { n: 2, m: 1 }, Params::Zieve { n: 1, m: 2 }],
        "power-map" => vec![Params::PowerMap { d: 2 }],
        "quadratic-sigma" => {
            let q = Field::rational();
            vec![Params::QuadraticSigma {
                f: RationalMap::from_ints(&q, &[1, 0, 2], &[0, -1, 1])?,
            }]
        }
        other => return Err(unknown(other)),
    })
}

fn unknown(name: &str) -> Error {
    Error::Precondition(format!(
        "unknown catalog entry {name:?}; expected one of {}",
        NAMES.join(", ")
    ))
}

/// `T = z³ − 3z`.
pub fn chebyshev_t(field: &Field) -> RationalMap {
    RationalMap::from_ints(field, &[0, -3, 0, 1], &[1]).expect("degree 3")
}

/// `z ↦ cz + 1/(cz)`.
pub fn joukowski(c: &FieldElement) -> Result<RationalMap> {
    if c.is_zero() {
        return Err(Error::Precondition("the parameter a must be nonzero".into()));
    }
    let k = c.field();
    let num = Poly::new(k.clone(), vec![k.one(), k.zero(), c * c]);
    let den = Poly::new(k.clone(), vec![k.zero(), c.clone()]);
    RationalMap::new(num, den)
}

/// `f_a = a T + 1/(a T)` with `T = z³ − 3z`, over the field of `a`.
pub fn flower_map(a: &FieldElement) -> Result<RationalMap> {
    joukowski(a)?.compose(&chebyshev_t(a.field()))
}

/// Lifts `a` into ℚ(ω) when it is rational in another field.
fn into_eisenstein(a: &FieldElement) -> Result<FieldElement> {
    let k = Field::eisenstein();
    if a.field() == &k {
        return Ok(a.clone());
    }
    match a.as_rational() {
        Some(q) => Ok(k.from_rational(q.clone())),
        None => Err(Error::Precondition(format!(
            "chebyshev-flower needs a in Q(w) with w^2+w+1 = 0; got {a} over {}",
            a.field().describe()
        ))),
    }
}

pub fn entry(params: &Params) -> Result<CatalogEntry> {
    match params {
        Params::ChebyshevFlower { a } => {
            let a = into_eisenstein(a)?;
            let k = a.field().clone();
            let t = chebyshev_t(&k);
            let r = joukowski(&a)?;
            let s = joukowski(&(&a * &k.generator()))?;
            let f = r.compose(&t)?;
            let g = s.compose(&t)?;
            let minus_a = -&a;
            Ok(CatalogEntry {
                name: "chebyshev-flower".into(),
                params: json!({ "a": element_to_value(&a), "a_display": a.to_string() }),
                field: k,
                maps: vec![
                    ("T".into(), t),
                    ("R".into(), r),
                    ("S".into(), s),
                    ("f".into(), f),
                    ("g".into(), g),
                    ("f_minus_a".into(), flower_map(&minus_a)?),
                ],
                expected: [
                    "T∘R = T∘S",
                    "R ≠ σ∘S for every Möbius σ",
                    "f∘f = f∘g",
                    "G∘F = G∘G",
                    "f_a∘f_a = f_{−a}∘f_{−a}",
                    "f_a ≠ f_{−a}",
                    "no shared iterate f^n = g^m of degree ≤ 1296",
                ]
                .into_iter()
                .map(|n| (n.to_string(), Verdict::Pass))
                .collect(),
                params_raw: params.clone(),
            })
        }
        Params::Zieve { n, m } => {
            let (n, m) = (*n, *m);
            if n < 1 || m < 1 {
                return Err(Error::Precondition(format!("zieve-family needs n, m >= 1, got ({n}, {m})")));
            }
            if n + m > 24 {
                return Err(Error::Precondition(format!("zieve-family with n+m = {} is too large", n + m)));
            }
            let k = Field::rational();
            let z = Poly::x(&k);
            let one = Poly::one(&k);
            let zn = z.pow(n);
            let t = RationalMap::from_poly(&zn * &(&z + &one).pow(m))?;
            let top = &one - &zn;
            let bottom = &z.pow(n + m) - &one;
            let r = RationalMap::new(top.clone(), bottom.clone())?;
            let s = RationalMap::new(&z.pow(m) * &top, bottom)?;
            let f = r.compose(&t)?;
            let g = s.compose(&t)?;
            // For n = m, S = −1 − R, so a Möbius factor exists.
            let factor = Verdict::from_bool(n != m);
            let mut expected = vec![
                ("T∘R = T∘S".to_string(), Verdict::Pass),
                ("R ≠ σ∘S for every Möbius σ".to_string(), factor),
                ("f∘f = f∘g".to_string(), Verdict::Pass),
                ("G∘F = G∘G".to_string(), Verdict::Pass),
            ];
            if r.degree() < 2 || s.degree() < 2 {
                expected.clear();
            }
            Ok(CatalogEntry {
                name: "zieve-family".into(),
                params: json!({ "n": n, "m": m }),
                field: k,
                maps: vec![
                    ("T".into(), t),
                    ("R".into(), r),
                    ("S".into(), s),
                    ("f".into(), f),
                    ("g".into(), g),
                ],
                expected,
                params_raw: params.clone(),
            })
        }
        Params::PowerMap { d } => {
            if *d < 2 || *d > 64 {
                return Err(Error::Precondition(format!("power-map needs 2 <= d <= 64, got {d}")));
            }
            let k = Field::rational();
            let f = RationalMap::power(&k, *d)?;
            let g = RationalMap::power(&k, d * d)?;
            let mut expected = vec![
                ("f^2 = g".to_string(), Verdict::Pass),
                ("F∘F = F∘G".to_string(), Verdict::Pass),
                ("G∘F = G∘G".to_string(), Verdict::Pass),
            ];
            if *d == 2 {
                expected.push(("σ_f = −z".to_string(), Verdict::Pass));
            }
            Ok(CatalogEntry {
                name: "power-map".into(),
                params: json!({ "d": d }),
                field: k,
                maps: vec![("f".into(), f), ("g".into(), g)],
                expected,
                params_raw: params.clone(),
            })
        }
        Params::QuadraticSigma { f } => {
            let sigma = sigma_f_quadratic(f)?;
            let g = sigma.to_map().compose(f)?;
            Ok(CatalogEntry {
                name: "quadratic-sigma".into(),
                params: json!({ "f": map_to_value(f), "f_display": f.to_string() }),
                field: f.field().clone(),
                maps: vec![("f".into(), f.clone()), ("sigma_f".into(), sigma.to_map()), ("g".into(), g)],
                expected: ["f∘σ_f = f", "σ_f∘σ_f = id", "F∘F = F∘G", "G∘F = G∘G"]
                    .into_iter()
                    .map(|n| (n.to_string(), Verdict::Pass))
                    .collect(),
                params_raw: params.clone(),
            })
        }
    }
}

/// Checks `f_a∘f_a = f_{−a}∘f_{−a}` and that `f_a ≠ f_{−a}`.
pub fn iterate_square_identity_check(a: &FieldElement) -> Result<CertificateReport> {
    let fa = flower_map(a)?;
    let fm = flower_map(&-a)?;
    let mut report = CertificateReport::default();
    let (sq_a, sq_m) = (fa.compose(&fa)?, fm.compose(&fm)?);
    report.push(
        "f_a∘f_a = f_{−a}∘f_{−a}",
        Verdict::from_bool(sq_a == sq_m),
        equality_witness(&sq_a, &sq_m),
        None,
    );
    report.push(
        "f_a ≠ f_{−a}",
        Verdict::from_bool(fa != fm),
        equality_witness(&fa, &fm),
        None,
    );
    Ok(report)
}

pub fn run_entry(entry: &CatalogEntry, config: &RunConfig) -> Result<EntryRun> {
    let get = |n: &str| entry.map(n).expect("entry map present");
    let mut report = CertificateReport::default();
    match &entry.params_raw {
        Params::ChebyshevFlower { a } => {
            let a = into_eisenstein(a)?;
            let mut rng = config.rng("identities.fiber");
            report.extend(check_counterexample_triple(get("R"), get("S"), get("T"), &mut rng)?);
            let main1 = check_main1_relations(get("f"), get("g"))?;
            report.claims.extend(main1.claims.into_iter().filter(|c| c.name == "G∘F = G∘G"));
            report.extend(iterate_square_identity_check(&a)?);
            let budget = 6u128.pow(4);
            let found = shared_iterate_search(get("f"), get("g"), budget)?;
            report.push(
                "no shared iterate f^n = g^m of degree ≤ 1296",
                Verdict::from_bool(found.is_none()),
                json!({ "budget": budget, "found": found }),
                None,
            );
        }
        Params::Zieve { .. } => {
            let (r, s) = (get("R"), get("S"));
            if r.degree() < 2 || s.degree() < 2 {
                return Err(Error::Precondition(format!(
                    "R and S reduce to degrees {} and {}; the triple check needs degree >= 2",
                    r.degree(),
                    s.degree()
                )));
            }
            let mut rng = config.rng("identities.fiber");
            report.extend(check_counterexample_triple(r, s, get("T"), &mut rng)?);
            let main1 = check_main1_relations(get("f"), get("g"))?;
            report.claims.extend(main1.claims.into_iter().filter(|c| c.name == "G∘F = G∘G"));
        }
        Params::PowerMap { d } => {
            let (f, g) = (get("f"), get("g"));
            let f2 = f.compose(f)?;
            report.push("f^2 = g", Verdict::from_bool(&f2 == g), equality_witness(&f2, g), None);
            report.extend(check_main1_relations(&f2, g)?);
            if *d == 2 {
                let sigma = sigma_f_quadratic(f)?;
                let neg = RationalMap::from_ints(f.field(), &[0, -1], &[1])?;
                report.push(
                    "σ_f = −z",
                    Verdict::from_bool(sigma.to_map() == neg),
                    json!({ "sigma": moebius_to_value(&sigma) }),
                    None,
                );
            }
        }
        Params::QuadraticSigma { .. } => {
            let (f, s, g) = (get("f"), get("sigma_f"), get("g"));
            let fs = f.compose(s)?;
            report.push("f∘σ_f = f", Verdict::from_bool(&fs == f), equality_witness(&fs, f), None);
            let ss = s.compose(s)?;
            let id = RationalMap::identity(f.field());
            report.push("σ_f∘σ_f = id", Verdict::from_bool(ss == id), equality_witness(&ss, &id), None);
            report.extend(check_main1_relations(f, g)?);
        }
    }
    let matches_expected = entry.expected.len() == report.claims.len()
        && entry
            .expected
            .iter()
            .all(|(name, v)| report.verdict(name) == Some(*v));
    let maps = Value::Object(
        entry
            .maps
            .iter()
            .map(|(n, m)| (n.clone(), json!({ "display": m.to_string(), "degree": m.degree(), "map": map_to_value(m) })))
            .collect(),
    );
    Ok(EntryRun {
        entry: entry.name.clone(),
        params: entry.params.clone(),
        field: field_to_value(&entry.field),
        maps,
        report,
        expected: entry.expected.clone(),
        matches_expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flower_a1_all_pass() {
        let e = entry(&Params::ChebyshevFlower { a: Field::rational().one() }).unwrap();
        assert_eq!(e.map("f").unwrap().degree(), 6);
        let run = run_entry(&e, &RunConfig::default()).unwrap();
        assert!(!run.report.any_fail(), "{:?}", run.report);
        assert!(run.matches_expected);
    }

    #[test]
    fn zieve_21_over_q() {
        let e = entry(&Params::Zieve { n: 2, m: 1 }).unwrap();
        assert!(e.field.is_rational());
        let run = run_entry(&e, &RunConfig::default()).unwrap();
        assert!(!run.report.any_fail(), "{:?}", run.report);
    }

    #[test]
    fn zieve_equal_exponents_have_a_factor() {
        let e = entry(&Params::Zieve { n: 2, m: 2 }).unwrap();
        let run = run_entry(&e, &RunConfig::default()).unwrap();
        assert_eq!(run.report.verdict("R ≠ σ∘S for every Möbius σ"), Some(Verdict::Fail));
        assert!(run.matches_expected);
    }

    #[test]
    fn square_identity() {
        let k = Field::rational();
        for a in [k.one(), k.from_int(2)] {
            assert!(!iterate_square_identity_check(&a).unwrap().any_fail());
        }
    }

    #[test]
    fn invalid_params() {
        let k = Field::rational();
        assert!(entry(&Params::ChebyshevFlower { a: k.zero() }).is_err());
        assert!(entry(&Params::Zieve { n: 0, m: 1 }).is_err());
        assert!(entry(&Params::ChebyshevFlower { a: Field::gaussian().generator() }).is_err());
    }

    #[test]
    fn power_and_sigma_defaults() {
        for name in ["power-map", "quadratic-sigma"] {
            for p in default_params(name).unwrap() {
                let run = run_entry(&entry(&p).unwrap(), &RunConfig::default()).unwrap();
                assert!(!run.report.any_fail() && run.matches_expected, "{name}");
            }
        }
    }
}
