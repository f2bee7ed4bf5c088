//! Floating-point machinery: sphere geometry, root finding and the
//! double-double fallback.

pub mod dd;
pub mod point;
pub mod roots;

pub use point::Point;
