//! Julia-set rasters from binned backward orbits.

use serde::Serialize;

use super::cloud::backward_orbits;
use crate::config::stream_rng;
use crate::error::{Error, Result};
use crate::map::RationalMap;

/// Axis-aligned window `[re_min, re_max] × [im_min, im_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn square(half: f64) -> Window {
        Window {
            re_min: -half,
            re_max: half,
            im_min: -half,
            im_max: half,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// Row-major hit counts, top row first.
    pub counts: Vec<u64>,
}

impl Raster {
    pub fn lit_fraction(&self) -> f64 {
        self.counts.iter().filter(|c| **c > 0).count() as f64 / self.counts.len() as f64
    }

    /// Log-scaled grayscale intensities.
    pub fn gray(&self) -> Vec<u8> {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        if max == 0 {
            return vec![0; self.counts.len()];
        }
        let scale = (1.0 + max as f64).ln();
        self.counts
            .iter()
            .map(|&c| (255.0 * (1.0 + c as f64).ln() / scale).round() as u8)
            .collect()
    }

    /// Binary P6 bytes with equal RGB channels.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        for g in self.gray() {
            out.extend_from_slice(&[g, g, g]);
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
/// Bins every backward-orbit point after the burn-in into a
/// `width × height` grid over `window`.
pub fn julia_raster(
    f: &RationalMap,
    width: usize,
    height: usize,
    window: Window,
    count: usize,
    depth: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Raster> {
    if width == 0 || height == 0 || !(window.re_max > window.re_min && window.im_max > window.im_min) {
        return Err(Error::Precondition("raster window and size must be nonempty".into()));
    }
    let mut counts = vec![0u64; width * height];
    let mut rng = stream_rng(seed, "measure.cloud.raster");
    let sx = width as f64 / (window.re_max - window.re_min);
    let sy = height as f64 / (window.im_max - window.im_min);
    backward_orbits(f, count, depth, &mut rng, |orbit| {
        for p in orbit.iter().skip(burn_in) {
            let Some(z) = p.finite() else { continue };
            let col = ((z.re - window.re_min) * sx).floor();
            let row = ((window.im_max - z.im) * sy).floor();
            if col >= 0.0 && row >= 0.0 && (col as usize) < width && (row as usize) < height {
                counts[row as usize * width + col as usize] += 1;
            }
        }
    })?;
    Ok(Raster { width, height, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Field;

    #[test]
    fn square_map_lights_an_annulus() {
        let f = RationalMap::power(&Field::rational(), 2).unwrap();
        let r = julia_raster(&f, 60, 60, Window::square(1.5), 300, 30, 10, 4).unwrap();
        for row in 0..60 {
            for col in 0..60 {
                if r.counts[row * 60 + col] > 0 {
                    let x = -1.5 + (col as f64 + 0.5) * 0.05;
                    let y = 1.5 - (row as f64 + 0.5) * 0.05;
                    assert!(((x * x + y * y).sqrt() - 1.0).abs() < 0.08);
                }
            }
        }
        assert!(r.lit_fraction() > 0.02);
    }

    #[test]
    fn empty_cloud_is_black() {
        let f = RationalMap::power(&Field::rational(), 2).unwrap();
        let r = julia_raster(&f, 8, 4, Window::square(1.0), 0, 30, 10, 4).unwrap();
        let ppm = r.to_ppm();
        assert!(ppm.starts_with(b"P6\n8 4\n255\n"));
        assert!(ppm[11..].iter().all(|b| *b == 0));
        assert_eq!(ppm.len(), 11 + 8 * 4 * 3);
    }
}
