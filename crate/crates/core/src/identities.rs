//! Exact composition identities and their certificates.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::rational::random_rational;
use crate::arith::{FieldElement, Poly};
use crate::config::Rng as StreamRng;
use crate::error::{Error, Result};
use crate::io::json::{element_to_value, moebius_to_value};
use crate::map::{ComplexMoebius, ExactPoint, Moebius, RationalMap};
use crate::numeric::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Claim {
    pub name: String,
    pub verdict: Verdict,
    pub witness: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CertificateReport {
    pub claims: Vec<Claim>,
}

impl CertificateReport {
    pub fn push(&mut self, name: &str, verdict: Verdict, witness: Value, note: Option<String>) {
        self.claims.push(Claim {
            name: name.to_string(),
            verdict,
            witness,
            note,
        });
    }

    pub fn any_fail(&self) -> bool {
        self.claims.iter().any(|c| c.verdict == Verdict::Fail)
    }

    pub fn verdict(&self, name: &str) -> Option<Verdict> {
        self.claims.iter().find(|c| c.name == name).map(|c| c.verdict)
    }

    pub fn extend(&mut self, other: CertificateReport) {
        self.claims.extend(other.claims);
    }
}

/// Witness for an exact equality test: the common digest on success, the
/// first differing coefficient otherwise.
pub fn equality_witness(left: &RationalMap, right: &RationalMap) -> Value {
    if left == right {
        return json!({ "equal": true, "degree": left.degree(), "digest": left.digest() });
    }
    for (part, l, r) in [("num", left.num(), right.num()), ("den", left.den(), right.den())] {
        let n = l.coeffs().len().max(r.coeffs().len());
        for i in 0..n {
            let (a, b) = (l.coeff(i), r.coeff(i));
            if a != b {
                return json!({
                    "equal": false,
                    "left_degree": left.degree(),
                    "right_degree": right.degree(),
                    "first_difference": { "part": part, "index": i,
                        "left": element_to_value(&a), "right": element_to_value(&b) },
                    "left_digest": left.digest(),
                    "right_digest": right.digest(),
                });
            }
        }
    }
    unreachable!("unequal maps differ in some coefficient")
}

fn equality_claim(report: &mut CertificateReport, name: &str, left: &RationalMap, right: &RationalMap) -> Result<bool> {
    let equal = left.equals(right)?;
    report.push(name, Verdict::from_bool(equal), equality_witness(left, right), None);
    Ok(equal)
}

fn require_degree(f: &RationalMap, min: usize, what: &str) -> Result<()> {
    if f.degree() < min {
        return Err(Error::Precondition(format!(
            "{what} must have degree >= {min}, got {}",
            f.degree()
        )));
    }
    Ok(())
}

/// Outcome of the search for `σ` with `R = σ ∘ S`.
#[derive(Clone, Debug)]
pub struct MobiusFactor {
    pub sigma: Option<Moebius>,
    /// Largest chordal spread of `R` over a fiber of `S` seen in the
    /// numeric test; `None` when the degrees differ.
    pub max_fiber_spread: Option<f64>,
    pub fibers_tested: usize,
}

const FIBER_SAMPLES: usize = 3 + 5;
const FIBER_SPREAD_TOL: f64 = 1e-6;

/// Decides whether `R = σ ∘ S` for a Möbius `σ`. A negative answer comes
/// from fibers of `S` on which `R` is not constant; a positive answer is
/// only given after the exact identity has been verified.
pub fn mobius_factor_exists(r: &RationalMap, s: &RationalMap, rng: &mut StreamRng) -> Result<MobiusFactor> {
    r.check_same_field(s)?;
    if r.degree() != s.degree() {
        return Ok(MobiusFactor {
            sigma: None,
            max_fiber_spread: None,
            fibers_tested: 0,
        });
    }
    let mut spread = 0.0f64;
    let mut samples: Vec<(Point, Point)> = Vec::new();
    let mut tested = 0;
    let mut failures = 0;
    while tested < FIBER_SAMPLES {
        let w = random_rational(rng, 60, 17);
        let w = Point::new(crate::arith::rational::to_f64(&w), 0.0);
        let w = match rng.gen_range(0..3) {
            0 => w,
            _ => Point::new(w.finite().unwrap().re, crate::arith::rational::to_f64(&random_rational(rng, 60, 17))),
        };
        let fiber = match s.preimages(w) {
            Ok(f) => f,
            Err(e) => {
                failures += 1;
                if failures > 10 {
                    return Err(e);
                }
                continue;
            }
        };
        let images: Vec<Point> = fiber.iter().map(|z| r.evaluate(*z)).collect();
        let mut local = 0.0f64;
        for a in &images {
            for b in &images {
                local = local.max(a.chordal(b));
            }
        }
        spread = spread.max(local);
        samples.push((w, images[0]));
        tested += 1;
    }
    let numeric_none = spread > FIBER_SPREAD_TOL;
    let exact = solve_factor(r, s)?;
    match (numeric_none, exact) {
        (true, None) => Ok(MobiusFactor {
            sigma: None,
            max_fiber_spread: Some(spread),
            fibers_tested: tested,
        }),
        (true, Some(sigma)) => Err(Error::Consistency(format!(
            "fiber test found R non-constant on fibers of S (spread {spread:.3e}) but R = ({sigma}) o S holds exactly"
        ))),
        (false, None) => Ok(MobiusFactor {
            sigma: None,
            max_fiber_spread: Some(spread),
            fibers_tested: tested,
        }),
        (false, Some(sigma)) => {
            // The numeric three-point fit must describe the same σ.
            let fit = ComplexMoebius::from_three_points(
                [samples[0].0, samples[1].0, samples[2].0],
                [samples[0].1, samples[1].1, samples[2].1],
            )?;
            let exact_c = sigma.to_complex();
            for (w, _) in &samples {
                let a = fit.apply(*w);
                let b = exact_c.apply(*w);
                if a.chordal(&b) > 1e-5 {
                    return Err(Error::Consistency(format!(
                        "numeric Moebius fit disagrees with exact factor {sigma} at {w}"
                    )));
                }
            }
            Ok(MobiusFactor {
                sigma: Some(sigma),
                max_fiber_spread: Some(spread),
                fibers_tested: tested,
            })
        }
    }
}

/// Solves `a N_S + b D_S = N_R`, `c N_S + d D_S = D_R` exactly and checks
/// `R = σ ∘ S` for the resulting `σ`.
fn solve_factor(r: &RationalMap, s: &RationalMap) -> Result<Option<Moebius>> {
    let n = r.degree() + 1;
    let (ns, ds) = (s.num(), s.den());
    // Two coefficient rows with an invertible 2×2 minor exist because N_S and
    // D_S are linearly independent.
    let mut rows = None;
    'search: for i in 0..n {
        for j in (i + 1)..n {
            let det = &(&ns.coeff(i) * &ds.coeff(j)) - &(&ns.coeff(j) * &ds.coeff(i));
            if !det.is_zero() {
                rows = Some((i, j, det));
                break 'search;
            }
        }
    }
    let Some((i, j, det)) = rows else {
        return Err(Error::Consistency("numerator and denominator are proportional".into()));
    };
    let solve = |target: &Poly| -> (FieldElement, FieldElement) {
        let (ti, tj) = (target.coeff(i), target.coeff(j));
        let a = &(&(&ti * &ds.coeff(j)) - &(&tj * &ds.coeff(i))) / &det;
        let b = &(&(&ns.coeff(i) * &tj) - &(&ns.coeff(j) * &ti)) / &det;
        (a, b)
    };
    let (a, b) = solve(r.num());
    let (c, d) = solve(r.den());
    let sigma = match Moebius::new(a, b, c, d) {
        Ok(m) => m,
        Err(_) => return Ok(None),
    };
    let candidate = sigma.to_map().compose(s)?;
    Ok((candidate == *r).then_some(sigma))
}

/// Checks `T∘R = T∘S`, that `R ≠ σ∘S` for every Möbius `σ`, and
/// `f∘f = f∘g` for `f = R∘T`, `g = S∘T`.
pub fn check_counterexample_triple(
    r: &RationalMap,
    s: &RationalMap,
    t: &RationalMap,
    rng: &mut StreamRng,
) -> Result<CertificateReport> {
    require_degree(r, 2, "R")?;
    require_degree(s, 2, "S")?;
    require_degree(t, 2, "T")?;
    r.check_same_field(s)?;
    r.check_same_field(t)?;
    let mut report = CertificateReport::default();
    equality_claim(&mut report, "T∘R = T∘S", &t.compose(r)?, &t.compose(s)?)?;

    if r.degree() != s.degree() {
        report.push(
            "R ≠ σ∘S for every Möbius σ",
            Verdict::Pass,
            json!({ "deg_R": r.degree(), "deg_S": s.degree() }),
            Some("vacuous: the degrees of R and S differ".into()),
        );
    } else {
        let found = mobius_factor_exists(r, s, rng)?;
        match &found.sigma {
            None => report.push(
                "R ≠ σ∘S for every Möbius σ",
                Verdict::Pass,
                json!({
                    "max_fiber_spread": found.max_fiber_spread,
                    "fibers_tested": found.fibers_tested,
                    "exact_linear_solve": "no solution",
                }),
                None,
            ),
            Some(sigma) => report.push(
                "R ≠ σ∘S for every Möbius σ",
                Verdict::Fail,
                json!({ "sigma": moebius_to_value(sigma) }),
                Some("R = σ∘S holds exactly for the witness σ".into()),
            ),
        }
    }

    let f = r.compose(t)?;
    let g = s.compose(t)?;
    equality_claim(&mut report, "f∘f = f∘g", &f.compose(&f)?, &f.compose(&g)?)?;
    Ok(report)
}

/// The two relations `F∘F = F∘G` and `G∘F = G∘G`.
pub fn check_main1_relations(f: &RationalMap, g: &RationalMap) -> Result<CertificateReport> {
    require_degree(f, 2, "F")?;
    require_degree(g, 2, "G")?;
    f.check_same_field(g)?;
    let mut report = CertificateReport::default();
    equality_claim(&mut report, "F∘F = F∘G", &f.compose(f)?, &f.compose(g)?)?;
    equality_claim(&mut report, "G∘F = G∘G", &g.compose(f)?, &g.compose(g)?)?;
    Ok(report)
}

fn iterate_point(f: &RationalMap, n: u32, x: (FieldElement, FieldElement)) -> (FieldElement, FieldElement) {
    let mut p = x;
    for _ in 0..n {
        p = f.eval_homogeneous(&p.0, &p.1);
    }
    p
}

/// Sample points `0, ∞, 1, −1, 2, −2, 1/2, …` of P¹(ℚ).
fn sample_points(field: &crate::arith::Field, count: usize) -> Vec<(FieldElement, FieldElement)> {
    let mut out = vec![(field.zero(), field.one()), (field.one(), field.zero())];
    let mut k = 1i64;
    while out.len() < count {
        for (p, q) in [(k, 1), (-k, 1), (1, k + 1), (-1, k + 1)] {
            out.push((field.from_int(p), field.from_int(q)));
        }
        k += 1;
    }
    out.truncate(count);
    out
}

/// Least `(n, m)` by `n + m` with `f^n = g^m` among pairs whose common
/// degree is at most `budget`.
pub fn shared_iterate_search(f: &RationalMap, g: &RationalMap, budget: u128) -> Result<Option<(u32, u32)>> {
    f.check_same_field(g)?;
    let (df, dg) = (f.degree() as u128, g.degree() as u128);
    if budget < df.max(dg) {
        return Err(Error::Precondition(format!(
            "budget {budget} is below max(deg f, deg g) = {}",
            df.max(dg)
        )));
    }
    let mut pairs = Vec::new();
    let mut n = 1u32;
    while df.checked_pow(n).is_some_and(|v| v <= budget) {
        let dn = df.pow(n);
        let mut m = 1u32;
        while let Some(dm) = dg.checked_pow(m).filter(|v| *v <= dn) {
            if dm == dn {
                pairs.push((n, m));
            }
            m += 1;
        }
        if df == 1 {
            break;
        }
        n += 1;
    }
    pairs.sort_by_key(|&(n, m)| (n + m, n));
    for (n, m) in pairs {
        let degree = df.pow(n) as usize;
        // Maps of degree D agreeing at 2D + 2 points of P¹ are equal.
        let mut agree = true;
        for x in sample_points(f.field(), 2 * degree + 2) {
            let a = iterate_point(f, n, x.clone());
            let b = iterate_point(g, m, x);
            if &a.0 * &b.1 != &a.1 * &b.0 {
                agree = false;
                break;
            }
        }
        if !agree {
            continue;
        }
        if (degree as u128) <= budget.min(crate::map::DEFAULT_DEGREE_BUDGET) {
            let fe = f.iterate(n, budget)?;
            let ge = g.iterate(m, budget)?;
            if fe != ge {
                return Err(Error::Consistency(format!(
                    "f^{n} and g^{m} agree at {} points but differ as maps",
                    2 * degree + 2
                )));
            }
        }
        return Ok(Some((n, m)));
    }
    Ok(None)
}

/// The involution `σ_f` of a quadratic map with `f ∘ σ_f = f`.
///
/// For `f = (a z² + b z + c)/(d z² + e z + r)`,
/// `σ_f(z) = (−(ar − cd) z − (br − ce)) / ((ae − bd) z + (ar − cd))`.
pub fn sigma_f_quadratic(f: &RationalMap) -> Result<Moebius> {
    if f.degree() != 2 {
        return Err(Error::Precondition(format!(
            "sigma_f needs a degree-2 map, got degree {}",
            f.degree()
        )));
    }
    let (n, dn) = (f.num(), f.den());
    let (a, b, c) = (n.coeff(2), n.coeff(1), n.coeff(0));
    let (d, e, r) = (dn.coeff(2), dn.coeff(1), dn.coeff(0));
    let p = &(&a * &r) - &(&c * &d);
    let q = &(&b * &r) - &(&c * &e);
    let s = &(&a * &e) - &(&b * &d);
    let sigma = Moebius::new(-&p, -&q, s, p.clone()).map_err(|_| {
        Error::Consistency(format!("sigma_f is degenerate for the quadratic {f}"))
    })?;
    let sm = sigma.to_map();
    if f.compose(&sm)? != *f {
        return Err(Error::Consistency(format!("f o sigma_f != f for {f}")));
    }
    if !sigma.compose(&sigma).is_identity() {
        return Err(Error::Consistency(format!("sigma_f is not an involution for {f}")));
    }
    Ok(sigma)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum DerivativeVerdict {
    /// Some sample has `|d/dt f_tⁿ| > 1e−8`.
    Nonzero { max_modulus: f64, samples: usize },
    /// Every sample vanished to within `1e−8`.
    Zero { max_modulus: f64, samples: usize },
    /// The direction only rescales numerator and denominator together.
    Degenerate,
}

/// Tests whether `t ↦ f_tⁿ` with `f_t = (num + t·δnum)/(den + t·δden)` has a
/// nonvanishing derivative at `t = 0`, by the chain rule
/// `dF_k = w(F_{k−1}) + f'(F_{k−1})·dF_{k−1}` with `w = d f_t/dt|₀`.
pub fn iteration_derivative_nonvanishing(
    f: &RationalMap,
    delta_num: &Poly,
    delta_den: &Poly,
    n: u32,
    samples: usize,
    rng: &mut StreamRng,
) -> Result<DerivativeVerdict> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    f.num().check_same_field(delta_num)?;
    f.num().check_same_field(delta_den)?;
    let w_num = &(delta_num * f.den()) - &(f.num() * delta_den);
    if w_num.is_zero() {
        return Ok(DerivativeVerdict::Degenerate);
    }
    let wn = w_num.to_complex();
    let den2 = (f.den() * f.den()).to_complex();
    let w = |z: Complex64| crate::numeric::roots::eval(&wn, z) / crate::numeric::roots::eval(&den2, z);
    let mut max_mod = 0.0f64;
    let mut used = 0;
    let mut attempts = 0;
    while used < samples && attempts < samples * 20 {
        attempts += 1;
        let z0 = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let mut z = z0;
        let mut dz = Complex64::new(0.0, 0.0);
        let mut ok = true;
        for _ in 0..n {
            let (Some(fp), wz) = (f.derivative_at(z), w(z)) else {
                ok = false;
                break;
            };
            dz = wz + fp * dz;
            match f.evaluate(Point::Finite(z)) {
                Point::Finite(next) => z = next,
                Point::Infinity => {
                    ok = false;
                    break;
                }
            }
            if !(dz.re.is_finite() && dz.im.is_finite()) {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        used += 1;
        max_mod = max_mod.max(dz.norm());
    }
    if used == 0 {
        return Err(Error::Precondition(
            "no sample point had a finite orbit; the map sends the sampling box to infinity".into(),
        ));
    }
    Ok(if max_mod > 1e-8 {
        DerivativeVerdict::Nonzero {
            max_modulus: max_mod,
            samples: used,
        }
    } else {
        DerivativeVerdict::Zero {
            max_modulus: max_mod,
            samples: used,
        }
    })
}

/// Exact evaluation convenience for callers holding an [`ExactPoint`].
pub fn exact_image(f: &RationalMap, z: &ExactPoint) -> ExactPoint {
    f.eval_exact(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Field;
    use crate::config::stream_rng;

    fn qq() -> Field {
        Field::rational()
    }

    fn rng() -> StreamRng {
        stream_rng(3, "test")
    }

    #[test]
    fn mobius_factor_examples() {
        let z2 = RationalMap::power(&qq(), 2).unwrap();
        let found = mobius_factor_exists(&z2, &z2, &mut rng()).unwrap();
        assert!(found.sigma.unwrap().is_identity());
        let inv_sq = RationalMap::from_ints(&qq(), &[1], &[0, 0, 1]).unwrap();
        let found = mobius_factor_exists(&z2, &inv_sq, &mut rng()).unwrap();
        let sigma = found.sigma.unwrap();
        assert_eq!(sigma.to_map(), RationalMap::from_ints(&qq(), &[1], &[0, 1]).unwrap());
        let cheb = RationalMap::from_ints(&qq(), &[0, -3, 0, 1], &[1]).unwrap();
        let z3 = RationalMap::power(&qq(), 3).unwrap();
        assert!(mobius_factor_exists(&cheb, &z3, &mut rng()).unwrap().sigma.is_none());
    }

    #[test]
    fn shared_iterates() {
        let z2 = RationalMap::power(&qq(), 2).unwrap();
        let z3 = RationalMap::power(&qq(), 3).unwrap();
        let z4 = RationalMap::power(&qq(), 4).unwrap();
        assert_eq!(shared_iterate_search(&z2, &z4, 4096).unwrap(), Some((2, 1)));
        assert_eq!(shared_iterate_search(&z2, &z3, 1 << 20).unwrap(), None);
        let z6 = RationalMap::power(&qq(), 6).unwrap();
        let z12 = RationalMap::power(&qq(), 12).unwrap();
        assert_eq!(shared_iterate_search(&z6, &z12, 1 << 20).unwrap(), None);
    }

    #[test]
    fn sigma_examples() {
        let z2 = RationalMap::power(&qq(), 2).unwrap();
        let s = sigma_f_quadratic(&z2).unwrap();
        assert_eq!(s.to_map(), RationalMap::from_ints(&qq(), &[0, -1], &[1]).unwrap());
        let joukowski = RationalMap::from_ints(&qq(), &[1, 0, 1], &[0, 1]).unwrap();
        let s = sigma_f_quadratic(&joukowski).unwrap();
        assert_eq!(s.to_map(), RationalMap::from_ints(&qq(), &[1], &[0, 1]).unwrap());
        assert!(sigma_f_quadratic(&RationalMap::power(&qq(), 3).unwrap()).is_err());
    }

    #[test]
    fn main1_examples() {
        let z2 = RationalMap::power(&qq(), 2).unwrap();
        let z3 = RationalMap::power(&qq(), 3).unwrap();
        let same = check_main1_relations(&z2, &z2).unwrap();
        assert!(!same.any_fail());
        let diff = check_main1_relations(&z2, &z3).unwrap();
        assert_eq!(diff.verdict("F∘F = F∘G"), Some(Verdict::Fail));
        assert_eq!(diff.verdict("G∘F = G∘G"), Some(Verdict::Fail));
    }

    #[test]
    fn iteration_derivative() {
        let k = qq();
        let z2 = RationalMap::power(&k, 2).unwrap();
        let one = Poly::one(&k);
        let zero = Poly::zero(&k);
        let v = iteration_derivative_nonvanishing(&z2, &one, &zero, 2, 8, &mut rng()).unwrap();
        assert!(matches!(v, DerivativeVerdict::Nonzero { .. }));
        let v = iteration_derivative_nonvanishing(&z2, z2.num(), z2.den(), 3, 8, &mut rng()).unwrap();
        assert_eq!(v, DerivativeVerdict::Degenerate);
        let v = iteration_derivative_nonvanishing(&z2, &Poly::x(&k), &zero, 1, 8, &mut rng()).unwrap();
        assert!(matches!(v, DerivativeVerdict::Nonzero { .. }));
    }
}
