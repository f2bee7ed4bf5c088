//! Empirical maximal-entropy measures.

pub mod cloud;
pub mod energy;
pub mod raster;

pub use cloud::{backward_orbit_sample, MeasureCloud};
pub use energy::{measure_distance, same_measure_test, MeasureDistanceReport, MeasureVerdict};
pub use raster::{julia_raster, Raster, Window};
