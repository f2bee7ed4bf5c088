//! Acceptance criteria. Each test prints one `criterion N PASS|FAIL` line
//! with its pinned tolerances, then asserts. Timed work runs under a shared
//! lock so runtimes are not inflated by parallel tests.

use std::io::Write;
use std::process::Command;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use equimeasure::arith::rational::ratio;
use equimeasure::arith::{BiPoly, Field, FieldElement, Poly};
use equimeasure::catalog::{entry, flower_map, run_entry, Params};
use equimeasure::config::{stream_rng, RunConfig};
use equimeasure::graph::{analyze_graph, GraphAnalysis};
use equimeasure::identities::{shared_iterate_search, sigma_f_quadratic, Verdict};
use equimeasure::map::{critical_data, ExactPoint, RationalMap};
use equimeasure::measure::energy::{verdict, SAME_FACTOR};
use equimeasure::measure::{
    backward_orbit_sample, julia_raster, measure_distance, same_measure_test, MeasureVerdict, Window,
};
use equimeasure::powermap::{self, is_periodic, period, same_periodic_points_powermaps, RootOfUnity};
use equimeasure::Error;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn line(n: u32, pass: bool, text: impl AsRef<str>) -> bool {
    let tag = if pass { "PASS" } else { "FAIL" };
    // Written to the handle directly so the line survives output capture.
    let _ = writeln!(std::io::stderr(), "criterion {n:>2} {tag} {}", text.as_ref());
    pass
}

/// One analyzed map, kept for the monodromy audit.
struct Analyzed {
    label: String,
    degree: usize,
    result: Result<GraphAnalysis, (bool, String)>,
}

struct Batch {
    items: Vec<Analyzed>,
    elapsed: Duration,
}

fn analyze(g: &RationalMap, seed: u64) -> Analyzed {
    Analyzed {
        label: g.to_string(),
        degree: g.degree(),
        result: analyze_graph(g, &RunConfig::with_seed(seed)).map_err(|e: Error| (e.is_internal(), e.to_string())),
    }
}

fn timed(maps: Vec<RationalMap>) -> Batch {
    let start = Instant::now();
    let items = maps.iter().enumerate().map(|(i, g)| analyze(g, i as u64 + 1)).collect();
    Batch {
        items,
        elapsed: start.elapsed(),
    }
}

fn chebyshev_cubic(k: &Field) -> RationalMap {
    RationalMap::from_ints(k, &[0, -3, 0, 1], &[1]).unwrap()
}

fn batch1() -> &'static Batch {
    static CELL: OnceLock<Batch> = OnceLock::new();
    CELL.get_or_init(|| timed(vec![chebyshev_cubic(&Field::rational())]))
}

fn batch2() -> &'static Batch {
    static CELL: OnceLock<Batch> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut rng = stream_rng(2, "acceptance.bidegree");
        let maps = (0..50).map(|i| RationalMap::random(&mut rng, 2 + i % 4, 5, 4, i % 5 == 0)).collect();
        timed(maps)
    })
}

fn batch3() -> &'static Batch {
    static CELL: OnceLock<Batch> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut rng = stream_rng(3, "acceptance.genus");
        let mut maps = Vec::new();
        while maps.len() < 20 {
            let g = RationalMap::random(&mut rng, 3 + maps.len() % 3, 4, 3, false);
            if critical_data(&g).unwrap().simple_value_count() >= 3 {
                maps.push(g);
            }
        }
        timed(maps)
    })
}

fn x(k: &Field) -> BiPoly {
    BiPoly::from_x(&Poly::x(k))
}

fn y(k: &Field) -> BiPoly {
    BiPoly::from_y(&Poly::x(k))
}

fn q(k: &Field, n: i64, d: i64) -> FieldElement {
    k.from_rational(ratio(n, d))
}

fn at(f: &RationalMap, z: &ExactPoint) -> ExactPoint {
    f.eval_exact(z)
}

/// Exact sample points for identity oracles.
fn sample_points(k: &Field) -> Vec<ExactPoint> {
    [(1, 3), (-2, 7), (5, 2), (7, 11), (-13, 5)]
        .iter()
        .map(|&(n, d)| ExactPoint::Finite(q(k, n, d)))
        .collect()
}

#[test]
fn criterion_01_chebyshev_cubic_graph() {
    let _g = serial();
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_equimeasure"))
        .args(["analyze-graph", "--map", "z^3-3z"])
        .output()
        .unwrap();
    let cli_time = start.elapsed();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let mut cli_shape: Vec<(u64, u64, u64)> = report["components"]
        .as_array()
        .map(|cs| {
            cs.iter()
                .map(|c| {
                    let b = |i: usize| c["bidegree"][i].as_u64().unwrap_or(0);
                    (b(0), b(1), c["genus"].as_u64().unwrap_or(99))
                })
                .collect()
        })
        .unwrap_or_default();
    cli_shape.sort();

    // Oracle: x³ − 3x − (y³ − 3y) = (x − y)(x² + xy + y² − 3).
    let k = Field::rational();
    let conic = &(&(&x(&k) * &x(&k)) + &(&x(&k) * &y(&k))) + &(&y(&k) * &y(&k));
    let conic = &conic - &BiPoly::from_x(&Poly::constant(k.from_int(3)));
    let line_xy = BiPoly::x_minus_y(&k);
    let factors_ok = match &batch1().items[0].result {
        Ok(a) => {
            let found: Vec<BiPoly> = a.components.iter().filter_map(|c| c.exact_poly.as_ref().map(BiPoly::normalized)).collect();
            found.len() == 2 && found.contains(&conic.normalized()) && found.contains(&line_xy.normalized())
        }
        Err(_) => false,
    };
    let shape_ok = cli_shape == [(1, 1, 0), (2, 2, 0)];
    let pass = out.status.code() == Some(0) && shape_ok && factors_ok && cli_time < Duration::from_secs(5);
    line(
        1,
        pass,
        format!(
            "analyze-graph z^3-3z: exit {:?}, components (r1,r2,genus) {cli_shape:?}, exact factors x-y and x^2+xy+y^2-3 {} (exact division); runtime {cli_time:.2?} < 5s",
            out.status.code(),
            if factors_ok { "found" } else { "MISSING" }
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_bidegree_proposition() {
    let _g = serial();
    let batch = batch2();
    let mut failures = Vec::new();
    for item in &batch.items {
        match &item.result {
            Ok(a) => {
                let sum: usize = a.components.iter().map(|c| c.bidegree.0).sum();
                let square = a.components.iter().all(|c| c.bidegree.0 == c.bidegree.1);
                if sum != item.degree || !square {
                    failures.push(format!("{}: sum {sum}, r1=r2 {square}", item.label));
                }
            }
            Err((_, e)) => failures.push(format!("{}: {e}", item.label)),
        }
    }
    let pass = failures.is_empty() && batch.elapsed < Duration::from_secs(180);
    line(
        2,
        pass,
        format!(
            "bidegrees over 50 random maps of degree 2-5: {} failures (exact sum = d, r1 = r2); runtime {:.1?} < 180s {:?}",
            failures.len(),
            batch.elapsed,
            failures
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_03_genus_lower_bound() {
    let _g = serial();
    let batch = batch3();
    let mut violations = Vec::new();
    let mut checked = 0;
    for item in &batch.items {
        match &item.result {
            Ok(a) => {
                for c in a.components.iter().filter(|c| c.bidegree.0 >= 2) {
                    checked += 1;
                    let r = c.bidegree.0;
                    if c.genus < 1 || c.genus < r / 2 {
                        violations.push(format!("{}: r {r}, genus {}", item.label, c.genus));
                    }
                }
            }
            Err((_, e)) => violations.push(format!("{}: {e}", item.label)),
        }
    }
    let pass = violations.is_empty();
    line(
        3,
        pass,
        format!(
            "20 maps of degree 3-5 with >= 3 simple critical values, {checked} components with r >= 2: {} violations of genus >= max(1, ceil((r-1)/2)) {:?}",
            violations.len(),
            violations
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_04_counterexample_certificates() {
    let _g = serial();
    let start = Instant::now();
    let w = Field::eisenstein();
    let mut cases: Vec<(String, Params)> = [w.one(), w.from_int(2), &w.one() + &w.generator()]
        .into_iter()
        .map(|a| (format!("flower a={a}"), Params::ChebyshevFlower { a }))
        .collect();
    for (n, m) in [(2, 1), (1, 2), (2, 2)] {
        cases.push((format!("zieve ({n},{m})"), Params::Zieve { n, m }));
    }
    let claims = ["T∘R = T∘S", "R ≠ σ∘S for every Möbius σ", "f∘f = f∘g"];
    let mut bad = Vec::new();
    let mut oracle_bad = Vec::new();
    for (label, params) in &cases {
        let e = entry(params).unwrap();
        let run = run_entry(&e, &RunConfig::default()).unwrap();
        for name in claims {
            if run.report.verdict(name) != Some(Verdict::Pass) {
                bad.push(format!("{label}: {name} {:?}", run.report.verdict(name)));
            }
        }
        // Oracle: the equalities pointwise at exact points, by nested
        // evaluation rather than composition.
        let m = |n: &str| e.map(n).unwrap();
        for z in sample_points(&e.field) {
            if at(m("T"), &at(m("R"), &z)) != at(m("T"), &at(m("S"), &z)) {
                oracle_bad.push(format!("{label}: T∘R != T∘S at {z:?}"));
            }
            let fz = at(m("f"), &z);
            if at(m("f"), &fz) != at(m("f"), &at(m("g"), &z)) {
                oracle_bad.push(format!("{label}: f∘f != f∘g at {z:?}"));
            }
        }
    }
    // For n = m the Möbius map w ↦ −1 − w carries R to S, so the
    // no-factor claim cannot pass there.
    let e = entry(&Params::Zieve { n: 2, m: 2 }).unwrap();
    let k = Field::rational();
    let (r, s) = (e.map("R").unwrap(), e.map("S").unwrap());
    let sigma = RationalMap::from_ints(&k, &[-1, -1], &[1]).unwrap();
    let witness = sample_points(&k).iter().all(|z| at(s, z) == at(&sigma, &at(r, z)));
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && oracle_bad.is_empty() && elapsed < Duration::from_secs(30);
    line(
        4,
        pass,
        format!(
            "3 claims x 6 cases, exact: non-PASS {bad:?}; pointwise oracle mismatches {}; zieve (2,2) S = -1-R {}; runtime {elapsed:.1?} < 30s",
            oracle_bad.len(),
            if witness { "holds (Moebius factor exists)" } else { "fails" }
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_measure_agreement() {
    let _g = serial();
    let start = Instant::now();
    let e = entry(&Params::ChebyshevFlower { a: Field::eisenstein().one() }).unwrap();
    let (f, g) = (e.map("f").unwrap(), e.map("g").unwrap());
    let k = Field::rational();
    let z2 = RationalMap::from_ints(&k, &[0, 0, 1], &[1]).unwrap();
    let z2p1 = RationalMap::from_ints(&k, &[1, 0, 1], &[1]).unwrap();
    let mut same = Vec::new();
    let mut diff = Vec::new();
    for seed in 1..=5 {
        same.push(same_measure_test(f, g, 20000, 40, seed).unwrap());
        diff.push(same_measure_test(&z2, &z2p1, 20000, 40, seed).unwrap());
    }
    let elapsed = start.elapsed();
    let ok_same = same.iter().all(|r| r.verdict == MeasureVerdict::Same);
    let ok_diff = diff.iter().all(|r| r.verdict == MeasureVerdict::Different);
    let pass = ok_same && ok_diff && elapsed < Duration::from_secs(120);
    let ratios = |v: &[equimeasure::measure::MeasureDistanceReport]| v.iter().map(|r| format!("{:.2}", r.ratio)).collect::<Vec<_>>();
    line(
        5,
        pass,
        format!(
            "count 20000, depth 40, seeds 1-5: flower f1/g1 ratios {:?} (SAME < 3x), z^2 vs z^2+1 ratios {:?} (DIFFERENT > 10x); runtime {elapsed:.1?} < 120s",
            ratios(&same),
            ratios(&diff)
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_sigma_for_quadratics() {
    let _g = serial();
    let mut rng = stream_rng(6, "acceptance.quadratics");
    let mut exact_bad = Vec::new();
    let mut measure_bad = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let f = RationalMap::random(&mut rng, 2, 5, 3, false);
        let sigma = sigma_f_quadratic(&f).unwrap().to_map();
        let id = RationalMap::identity(f.field());
        let exact = f.compose(&sigma).unwrap() == f && sigma.compose(&sigma).unwrap() == id && sigma != id;
        // Oracle: f(σ(z)) = f(z) pointwise at exact points.
        let pointwise = sample_points(f.field()).iter().all(|z| at(&f, &at(&sigma, z)) == at(&f, z));
        if !(exact && pointwise) {
            exact_bad.push(f.to_string());
        }
        let a = backward_orbit_sample(&f, 4000, 30, i, "a").unwrap();
        let b = backward_orbit_sample(&f, 4000, 30, i, "b").unwrap();
        let base = measure_distance(&a, &b).unwrap();
        let d = measure_distance(&a.push_forward(&sigma), &b).unwrap();
        worst = worst.max(d / base);
        if verdict(d, base) != MeasureVerdict::Same {
            measure_bad.push(format!("{f}: ratio {:.2}", d / base));
        }
    }
    let pass = exact_bad.is_empty() && measure_bad.is_empty();
    line(
        6,
        pass,
        format!(
            "100 random quadratics: f∘σ = f, σ∘σ = id, σ != id exact failures {}; σ push-forward vs independent cloud (count 4000, depth 30) worst ratio {worst:.2} < {SAME_FACTOR}x, failures {measure_bad:?}",
            exact_bad.len()
        ),
    );
    assert!(pass);
}

/// Oracle: iterate `a·d^n mod b` and report the first return to `a`.
fn brute_period(a: u64, b: u64, d: u64) -> Option<u64> {
    let mut v = a * d % b;
    for n in 1..=b {
        if v == a {
            return Some(n);
        }
        v = v * d % b;
    }
    None
}

#[test]
fn criterion_07_power_maps() {
    let _g = serial();
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for d in 2..=12u64 {
        for b in 1..=50u64 {
            for a in (0..b).filter(|a| num_integer::gcd(*a, b) == 1) {
                let z = RootOfUnity::new(a, b).unwrap();
                checked += 1;
                if period(z, d) != brute_period(a, b, d) || is_periodic(z, d) != brute_period(a, b, d).is_some() {
                    mismatches.push(format!("d {d}, {a}/{b}"));
                }
            }
        }
    }
    for df in 2..=12u64 {
        for dg in 2..=12u64 {
            let oracle = (1..=50u64).all(|b| {
                (0..b)
                    .filter(|a| num_integer::gcd(*a, b) == 1)
                    .all(|a| brute_period(a, b, df).is_some() == brute_period(a, b, dg).is_some())
            });
            if same_periodic_points_powermaps(df, dg).unwrap() != oracle {
                mismatches.push(format!("same({df}, {dg})"));
            }
        }
    }
    let dyadic: Vec<RootOfUnity> = (1..=10).map(|k| RootOfUnity::new(1, 1 << k).unwrap()).collect();
    let r35 = powermap::report(3, 5, &dyadic).unwrap();
    let paper_cases = same_periodic_points_powermaps(6, 12).unwrap()
        && !r35.same_periodic_points
        && r35.points.iter().all(|p| p.periodic_f && p.periodic_g);
    let elapsed = start.elapsed();
    let pass = mismatches.is_empty() && paper_cases && elapsed < Duration::from_secs(10);
    line(
        7,
        pass,
        format!(
            "{checked} (d, a/b) periods and 121 pairs vs brute-force orbits: {} mismatches; 6 vs 12 equal, 3 vs 5 unequal with e^(2 pi i/2^k) periodic for k <= 10: {paper_cases}; runtime {elapsed:.2?} < 10s",
            mismatches.len()
        ),
    );
    assert!(pass);
}

/// Independent audit of one analysis: loop product, orbit invariance and
/// Riemann–Hurwitz integrality recomputed from the raw permutations.
fn audit(a: &GraphAnalysis) -> Result<(), String> {
    let perms = &a.monodromy.permutations;
    let n = a.monodromy.fiber.len();
    let mut product: Vec<usize> = (0..n).collect();
    for p in perms {
        product = product.iter().map(|&j| p[j]).collect();
    }
    if product.iter().enumerate().any(|(i, &j)| i != j) {
        return Err("sphere relation fails".into());
    }
    let mut covered = vec![false; n];
    for c in &a.components {
        let r = c.orbit.len();
        let mut excess = 0usize;
        for p in perms {
            if c.orbit.iter().any(|&i| !c.orbit.contains(&p[i])) {
                return Err(format!("orbit {:?} not invariant", c.orbit));
            }
            let mut seen = vec![false; n];
            let mut cycles = 0;
            for &i in &c.orbit {
                if !seen[i] {
                    cycles += 1;
                    let mut j = i;
                    while !seen[j] {
                        seen[j] = true;
                        j = p[j];
                    }
                }
            }
            excess += r - cycles;
        }
        let twice = excess as i64 - 2 * r as i64 + 2;
        if twice < 0 || twice % 2 != 0 || (twice / 2) as usize != c.genus {
            return Err(format!("Riemann-Hurwitz gives 2g = {twice}, reported genus {}", c.genus));
        }
        for &i in &c.orbit {
            if std::mem::replace(&mut covered[i], true) {
                return Err("orbits overlap".into());
            }
        }
    }
    if covered.iter().any(|c| !c) {
        return Err("orbits do not cover the fiber".into());
    }
    Ok(())
}

#[test]
fn criterion_08_monodromy_soundness() {
    let _g = serial();
    let mut total = 0;
    let mut violations = Vec::new();
    for batch in [batch1(), batch2(), batch3()] {
        for item in &batch.items {
            total += 1;
            match &item.result {
                Ok(a) => {
                    if let Err(e) = audit(a) {
                        violations.push(format!("{}: {e}", item.label));
                    }
                }
                Err((internal, e)) => {
                    let code = if *internal { 3 } else { 2 };
                    violations.push(format!("{}: exit {code}: {e}", item.label));
                }
            }
        }
    }
    let pass = violations.is_empty();
    line(
        8,
        pass,
        format!(
            "{total} analyses from criteria 1-3: sphere relation, orbit invariance and integral Riemann-Hurwitz genus recomputed independently; {} violations {violations:?}",
            violations.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_flower_render() {
    let _g = serial();
    let k = Field::gaussian();
    let a = &q(&k, 4843, 10000) + &(&q(&k, 7776, 100000) * &k.generator());
    let f = flower_map(&a).unwrap();
    let window = Window::square(2.0);
    let render = || julia_raster(&f, 256, 256, window, 20000, 40, 10, 9).unwrap();
    let (r1, r2) = (render(), render());
    let deterministic = r1.to_ppm() == r2.to_ppm();
    let lit = r1.lit_fraction();
    let ca = backward_orbit_sample(&f, 8000, 40, 9, "a").unwrap();
    let cb = backward_orbit_sample(&f, 8000, 40, 9, "b").unwrap();
    let base = measure_distance(&ca, &cb).unwrap();
    let pushed = measure_distance(&ca.push_forward(&f), &cb).unwrap();
    let invariant = verdict(pushed, base) == MeasureVerdict::Same;
    let pass = deterministic && (0.01..=0.5).contains(&lit) && invariant;
    line(
        9,
        pass,
        format!(
            "f_a, a = 0.4843+0.07776i over Q(i), 256x256 on [-2,2]^2: deterministic {deterministic}, lit fraction {:.2}% in [1%, 50%], forward-invariance ratio {:.2} < {SAME_FACTOR}x (count 8000, depth 40)",
            lit * 100.0,
            pushed / base
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_shared_iterate_control() {
    let _g = serial();
    let start = Instant::now();
    let e = entry(&Params::ChebyshevFlower { a: Field::eisenstein().one() }).unwrap();
    let flower = shared_iterate_search(e.map("f").unwrap(), e.map("g").unwrap(), 6u128.pow(4)).unwrap();
    let mut rng = stream_rng(10, "acceptance.iterates");
    let mut wrong = Vec::new();
    for _ in 0..10 {
        let f = RationalMap::random(&mut rng, 2, 5, 3, false);
        let f3 = f.iterate(3, 4096).unwrap();
        let found = shared_iterate_search(&f, &f3, 64).unwrap();
        if found != Some((3, 1)) {
            wrong.push(format!("{f}: {found:?}"));
        }
    }
    let elapsed = start.elapsed();
    let pass = flower.is_none() && wrong.is_empty() && elapsed < Duration::from_secs(60);
    line(
        10,
        pass,
        format!(
            "flower f1, g1 within degree 6^4: {flower:?} (want None); (f, f^3) for 10 random quadratics: {} not (3,1); runtime {elapsed:.1?} < 60s",
            wrong.len()
        ),
    );
    assert!(pass);
}
