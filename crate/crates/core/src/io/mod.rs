//! Input parsing and JSON serialization.

pub mod json;
pub mod shorthand;

use std::collections::BTreeMap;

use crate::arith::{Field, FieldElement};
use crate::error::Result;
use crate::map::RationalMap;

/// A map given either as JSON (text starting with `{`) or in shorthand over
/// `field` with the given symbol bindings.
pub fn parse_map_input(
    text: &str,
    field: &Field,
    symbols: &BTreeMap<String, FieldElement>,
) -> Result<RationalMap> {
    if text.trim_start().starts_with('{') {
        json::parse_map_json(text)
    } else {
        shorthand::parse_map(text, field, symbols)
    }
}
