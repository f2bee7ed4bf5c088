//! Simultaneous polynomial root finding (Aberth–Ehrlich) with backward-error
//! certification and double-double escalation.

use num_complex::Complex64;

use super::dd::{self, CDd};
use crate::error::{Error, Result};

/// Roots are accepted once their normwise backward error is below this.
pub const RESIDUAL_TOL: f64 = 1e-10;

const MAX_ITER: usize = 600;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(czero(), |acc, c| acc * z + c)
}

pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = czero();
    let mut dp = czero();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `|p(z)| / Σ|a_i||z|^i`, evaluated in the reversed chart when `|z| > 1`.
pub fn backward_error(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    if r <= 1.0 {
        let num = eval(coeffs, z).norm();
        let den = coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
        ratio(num, den)
    } else {
        let w = z.inv();
        let rw = w.norm();
        let num = coeffs.iter().fold(czero(), |acc, c| acc * w + c).norm();
        let den = coeffs.iter().fold(0.0, |acc, c| acc * rw + c.norm());
        ratio(num, den)
    }
}

fn backward_error_dd(coeffs: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = dd::eval_with_derivative(coeffs, CDd::from_c64(z));
    let r = z.norm();
    let den = coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    ratio(p.norm(), den)
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

fn trim(coeffs: &[Complex64]) -> &[Complex64] {
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1] == czero() {
        end -= 1;
    }
    &coeffs[..end]
}

fn describe(coeffs: &[Complex64]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .map(|c| format!("({:.6e}{:+.6e}i)", c.re, c.im))
        .collect();
    format!("[{}] (ascending)", terms.join(", "))
}

/// All finite roots of `Σ coeffs[i] z^i`, with multiplicity. Trailing zero
/// coefficients lower the degree; exact zero roots are split off exactly.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let coeffs = trim(coeffs);
    if coeffs.is_empty() {
        return Err(Error::Precondition("roots of the zero polynomial".into()));
    }
    let zeros = coeffs.iter().take_while(|c| **c == czero()).count();
    let reduced = &coeffs[zeros..];
    let mut out = vec![czero(); zeros];
    out.extend(nonzero_roots(reduced)?);
    Ok(out)
}

fn nonzero_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-coeffs[0] / coeffs[1]]),
        2 => {
            if let Some(z) = quadratic_roots(coeffs) {
                return Ok(z);
            }
        }
        _ => {}
    }
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();

    // Start on a circle whose radius is the geometric mean of the root moduli.
    let bound = (0..n)
        .map(|i| monic[i].norm().powf(1.0 / (n - i) as f64))
        .fold(0.0, f64::max)
        * 2.0;
    let radius = monic[0].norm().powf(1.0 / n as f64).clamp(bound * 1e-3, bound.max(1e-300));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let mut done = vec![false; n];
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = eval_with_derivative(&monic, z[k]);
            if p == czero() {
                done[k] = true;
                continue;
            }
            let newton = if dp == czero() {
                // Nudge off a critical point of p.
                Complex64::new(1e-8 * (1.0 + z[k].norm()), 1e-8)
            } else {
                p / dp
            };
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let diff = z[k] - z[j];
                    if diff == czero() {
                        Complex64::new(1e16, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom == czero() { newton } else { newton / denom };
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            z[k] -= step;
            if step.norm() <= 1e-15 * (1.0 + z[k].norm()) {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }

    for zk in z.iter_mut() {
        if backward_error(coeffs, *zk) < RESIDUAL_TOL {
            continue;
        }
        *zk = refine_dd(coeffs, *zk, 8);
        if backward_error_dd(coeffs, *zk) >= RESIDUAL_TOL {
            return Err(Error::RootFinding {
                poly: describe(coeffs),
            });
        }
    }
    Ok(z)
}

/// Cancellation-free quadratic formula; `None` when a root fails the
/// backward-error test and the general solver should take over.
fn quadratic_roots(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let (c, b, a) = (coeffs[0], coeffs[1], coeffs[2]);
    let s = (b * b - 4.0 * a * c).sqrt();
    let t = if (b.conj() * s).re >= 0.0 { b + s } else { b - s };
    if t == czero() {
        return None;
    }
    let q = -0.5 * t;
    let z = vec![q / a, c / q];
    z.iter()
        .all(|r| backward_error(coeffs, *r) < RESIDUAL_TOL)
        .then_some(z)
}

/// Newton iterations in double-double starting from `z`.
pub fn refine_dd(coeffs: &[Complex64], z: Complex64, steps: usize) -> Complex64 {
    let mut w = CDd::from_c64(z);
    for _ in 0..steps {
        let (p, dp) = dd::eval_with_derivative(coeffs, w);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.norm().is_finite() {
            break;
        }
        w = w - step;
    }
    w.to_c64()
}

/// A few plain Newton steps; used to polish roots of nearby polynomials.
pub fn newton_polish(coeffs: &[Complex64], mut z: Complex64, steps: usize) -> Complex64 {
    for _ in 0..steps {
        let (p, dp) = eval_with_derivative(coeffs, z);
        if dp == czero() {
            break;
        }
        let step = p / dp;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        z -= step;
    }
    z
}
