//! Rational self-maps of P¹, Möbius transformations and critical data.

pub mod critical;
pub mod moebius;
pub mod rational_map;

pub use critical::{critical_data, CriticalData, CriticalPoint, CriticalValue};
pub use moebius::{ComplexMoebius, Moebius};
pub use rational_map::{RationalMap, DEFAULT_DEGREE_BUDGET};

use crate::arith::{Field, FieldElement};
use crate::numeric::Point;

/// A point of P¹ over the coefficient field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactPoint {
    Finite(FieldElement),
    Infinity,
}

impl ExactPoint {
    pub fn from_homogeneous(x0: FieldElement, x1: FieldElement) -> ExactPoint {
        if x1.is_zero() {
            ExactPoint::Infinity
        } else {
            ExactPoint::Finite(&x0 / &x1)
        }
    }

    pub fn homogeneous(&self, field: &Field) -> (FieldElement, FieldElement) {
        match self {
            ExactPoint::Finite(x) => (x.clone(), field.one()),
            ExactPoint::Infinity => (field.one(), field.zero()),
        }
    }

    pub fn to_point(&self) -> Point {
        match self {
            ExactPoint::Finite(x) => Point::Finite(x.to_complex()),
            ExactPoint::Infinity => Point::Infinity,
        }
    }
}
