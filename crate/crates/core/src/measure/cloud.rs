//! Backward-orbit sampling of the measure of maximal entropy.

use rand::Rng as _;
use serde::Serialize;

use crate::config::{stream_rng, Rng};
use crate::error::{Error, Result};
use crate::map::{critical_data, RationalMap};
use crate::numeric::Point;

const EXCEPTIONAL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct CloudMeta {
    pub map_digest: String,
    pub count: usize,
    pub depth: usize,
    pub seed: u64,
    pub stream: String,
    pub discarded_orbits: usize,
}

/// Uniformly weighted points on the unit sphere.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureCloud {
    pub points: Vec<[f64; 3]>,
    pub meta: CloudMeta,
}

impl MeasureCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    /// The image cloud under `f`.
    pub fn push_forward(&self, f: &RationalMap) -> MeasureCloud {
        MeasureCloud {
            points: self
                .points
                .iter()
                .map(|p| f.evaluate(Point::from_sphere(*p)).to_sphere())
                .collect(),
            meta: self.meta.clone(),
        }
    }
}

/// Points whose backward orbits never leave a finite set: fully ramified
/// critical values and the critical points above them.
pub fn exceptional_candidates(f: &RationalMap) -> Result<Vec<Point>> {
    let d = f.degree();
    let data = critical_data(f)?;
    let mut out = Vec::new();
    for v in &data.values {
        if v.points.len() == 1 && data.points[v.points[0]].multiplicity == d - 1 {
            out.push(v.value);
            out.push(data.points[v.points[0]].point);
        }
    }
    Ok(out)
}

fn random_start(rng: &mut Rng, avoid: &[Point]) -> Point {
    loop {
        let z = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if avoid.iter().all(|e| e.chordal(&z) > EXCEPTIONAL_TOL) {
            return z;
        }
    }
}

/// Runs `count` independent backward orbits of length `depth` from random
/// starts, handing each orbit's points `z_1, …, z_depth` to `visit`.
pub fn backward_orbits(
    f: &RationalMap,
    count: usize,
    depth: usize,
    rng: &mut Rng,
    mut visit: impl FnMut(&[Point]),
) -> Result<usize> {
    if f.degree() < 2 {
        return Err(Error::Precondition(format!(
            "backward orbits need degree >= 2, got {}",
            f.degree()
        )));
    }
    let avoid = exceptional_candidates(f)?;
    let mut orbit = Vec::with_capacity(depth);
    let mut done = 0;
    let mut discarded = 0;
    while done < count {
        orbit.clear();
        let mut z = random_start(rng, &avoid);
        let mut ok = true;
        for _ in 0..depth {
            match f.preimages(z) {
                Ok(pre) => {
                    z = pre[rng.gen_range(0..pre.len())];
                    orbit.push(z);
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            visit(&orbit);
            done += 1;
        } else {
            discarded += 1;
            if discarded > 10 * count.max(1) {
                return Err(Error::RootFinding {
                    poly: format!("preimage equations of {f}; {discarded} orbits discarded"),
                });
            }
        }
    }
    Ok(discarded)
}

/// Endpoints of `count` backward orbits of length `depth`, drawn from the
/// stream `measure.cloud.<tag>`.
pub fn backward_orbit_sample(
    f: &RationalMap,
    count: usize,
    depth: usize,
    seed: u64,
    tag: &str,
) -> Result<MeasureCloud> {
    let stream = format!("measure.cloud.{tag}");
    let mut rng = stream_rng(seed, &stream);
    let mut points = Vec::with_capacity(count);
    let discarded = backward_orbits(f, count, depth, &mut rng, |orbit| {
        let end = orbit.last().copied().unwrap_or(Point::new(0.0, 0.0));
        points.push(end.to_sphere());
    })?;
    Ok(MeasureCloud {
        points,
        meta: CloudMeta {
            map_digest: f.digest(),
            count,
            depth,
            seed,
            stream,
            discarded_orbits: discarded,
        },
    })
}
