//! Run configuration and the seeded random streams derived from it.
//!
//! Every random choice in the library draws from a named stream, seeded from
//! the run seed mixed with an FNV-1a hash of the stream name. The streams in
//! use are:
//!
//! | stream                | consumer                                        |
//! |-----------------------|-------------------------------------------------|
//! | `graph.chart`         | candidate charts when ∞ must be looped around   |
//! | `graph.basepoint`     | basepoint draws for monodromy                   |
//! | `graph.crosscheck`    | detour midpoints for the second-degree check    |
//! | `identities.fiber`    | sample values for the Möbius fiber test         |
//! | `identities.derivative` | sample points for the iteration derivative    |
//! | `measure.cloud.<tag>` | start points and preimage choices of one cloud  |
//! | `measure.subsample`   | subsampling in the energy distance              |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rng = ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Normwise backward error accepted for a numeric root.
    pub root_residual: f64,
    /// Chordal distance under which numeric points are identified.
    pub cluster_tol: f64,
    /// Minimal gap between best and second-best fiber matching.
    pub fiber_match_tol: f64,
    /// Largest composite degree built or tested exactly.
    pub degree_budget: u64,
    pub cloud_count: usize,
    pub cloud_depth: usize,
    /// Backward-orbit steps skipped before raster binning.
    pub burn_in: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            root_residual: crate::numeric::roots::RESIDUAL_TOL,
            cluster_tol: 1e-7,
            fiber_match_tol: 1e-6,
            degree_budget: 4096,
            cloud_count: 20_000,
            cloud_depth: 40,
            burn_in: 10,
        }
    }
}

impl RunConfig {
    pub fn with_seed(seed: u64) -> Self {
        RunConfig {
            seed,
            ..RunConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("root_residual", self.root_residual),
            ("cluster_tol", self.cluster_tol),
            ("fiber_match_tol", self.fiber_match_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Precondition(format!("{name} must be positive, got {v}")));
            }
        }
        if self.degree_budget < 2 {
            return Err(Error::Precondition("degree_budget must be at least 2".into()));
        }
        Ok(())
    }

    pub fn rng(&self, stream: &str) -> Rng {
        stream_rng(self.seed, stream)
    }
}

pub fn stream_rng(seed: u64, stream: &str) -> Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(stream.as_bytes()))
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
