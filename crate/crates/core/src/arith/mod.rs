//! Exact arithmetic: rationals, number fields ℚ(α), and polynomials over them.

pub mod bipoly;
pub mod field;
pub mod poly;
pub mod rational;

pub use bipoly::BiPoly;
pub use field::{Field, FieldElement};
pub use poly::Poly;
