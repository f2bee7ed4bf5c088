//! Energy distance between point clouds under the chordal metric.

use rand::seq::index::sample;
use serde::Serialize;

use super::cloud::{backward_orbit_sample, MeasureCloud};
use crate::config::stream_rng;
use crate::error::{Error, Result};
use crate::map::RationalMap;

/// Number of disjoint blocks the clouds are split into. A single V-statistic
/// is dominated by a few low-frequency modes, so its ratio to an independent
/// copy is heavy-tailed; averaging blocks steadies the baseline.
pub const BLOCKS: usize = 16;
/// Smallest block; smaller clouds use fewer blocks.
pub const MIN_BLOCK: usize = 64;
pub const SAME_FACTOR: f64 = 3.0;
pub const DIFFERENT_FACTOR: f64 = 10.0;

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let (x, y, z) = (a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    (x * x + y * y + z * z).sqrt()
}

fn mean_distance(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    let mut total = 0.0;
    for p in a {
        let mut row = 0.0;
        for q in b {
            row += dist(p, q);
        }
        total += row;
    }
    total / (a.len() * b.len()) as f64
}

fn energy_all_pairs(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    (2.0 * mean_distance(a, b) - mean_distance(a, a) - mean_distance(b, b)).max(0.0)
}

/// `count` disjoint blocks of `size` points in a seeded random order.
fn blocks(points: &[[f64; 3]], count: usize, size: usize, seed: u64) -> Vec<Vec<[f64; 3]>> {
    let mut rng = stream_rng(seed, "measure.subsample");
    let idx = sample(&mut rng, points.len(), count * size).into_vec();
    idx.chunks(size).map(|c| c.iter().map(|&i| points[i]).collect()).collect()
}

/// `2E|X−Y| − E|X−X'| − E|Y−Y'|` as a V-statistic, so identical clouds are
/// at distance exactly zero. The clouds are split into up to `BLOCKS`
/// disjoint seeded blocks of equal size and the block distances averaged.
pub fn measure_distance(a: &MeasureCloud, b: &MeasureCloud) -> Result<f64> {
    energy_distance(&a.points, &b.points, a.meta.seed ^ b.meta.seed)
}

pub fn energy_distance(a: &[[f64; 3]], b: &[[f64; 3]], seed: u64) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("energy distance of an empty cloud".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    let n = a.len().min(b.len());
    let count = (n / MIN_BLOCK).clamp(1, BLOCKS);
    if count == 1 {
        return Ok(energy_all_pairs(a, b));
    }
    let size = n / count;
    let (ba, bb) = (blocks(a, count, size, seed), blocks(b, count, size, seed));
    let total: f64 = ba.iter().zip(&bb).map(|(x, y)| energy_all_pairs(x, y)).sum();
    Ok(total / count as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MeasureVerdict {
    Same,
    Different,
    Inconclusive,
}

pub fn verdict(distance: f64, baseline: f64) -> MeasureVerdict {
    if distance < SAME_FACTOR * baseline {
        MeasureVerdict::Same
    } else if distance > DIFFERENT_FACTOR * baseline {
        MeasureVerdict::Different
    } else {
        MeasureVerdict::Inconclusive
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureDistanceReport {
    pub distance: f64,
    pub self_baseline: f64,
    pub ratio: f64,
    pub verdict: MeasureVerdict,
    pub count: usize,
    pub depth: usize,
    pub seed: u64,
    pub f_digest: String,
    pub g_digest: String,
    /// The 3× and 10× thresholds are engineering calibrations.
    pub thresholds: [f64; 2],
}

/// Samples two independent clouds of `f` and one of `g`; the baseline is the
/// distance between the two `f` clouds.
pub fn same_measure_test(
    f: &RationalMap,
    g: &RationalMap,
    count: usize,
    depth: usize,
    seed: u64,
) -> Result<MeasureDistanceReport> {
    if count == 0 {
        return Err(Error::Precondition("count must be positive".into()));
    }
    let fa = backward_orbit_sample(f, count, depth, seed, "f.a")?;
    let fb = backward_orbit_sample(f, count, depth, seed, "f.b")?;
    let gc = backward_orbit_sample(g, count, depth, seed, "g")?;
    let baseline = measure_distance(&fa, &fb)?;
    let distance = measure_distance(&fa, &gc)?;
    Ok(MeasureDistanceReport {
        distance,
        self_baseline: baseline,
        ratio: distance / baseline,
        verdict: verdict(distance, baseline),
        count,
        depth,
        seed,
        f_digest: f.digest(),
        g_digest: g.digest(),
        thresholds: [SAME_FACTOR, DIFFERENT_FACTOR],
    })
}
