//! JSON forms of fields, elements, maps and bivariate polynomials.
//!
//! Rationals are written as `"num/den"` strings. An element of ℚ is a single
//! string; an element of an extension is an array of strings in the power
//! basis `1, α, …`. A map is `{"field": minpoly-or-null, "num": [...],
//! "den": [...]}` with ascending coefficients.

use serde_json::{json, Value};

use crate::arith::rational::{format_rational, parse_rational};
use crate::arith::{BiPoly, Field, FieldElement, Poly};
use crate::error::{Error, Result};
use crate::map::{ExactPoint, Moebius, RationalMap};
use crate::numeric::Point;

pub fn field_to_value(field: &Field) -> Value {
    if field.is_rational() {
        Value::Null
    } else {
        Value::Array(
            field
                .minpoly()
                .iter()
                .map(|c| Value::String(format_rational(c)))
                .collect(),
        )
    }
}

pub fn field_from_value(v: &Value, path: &str) -> Result<Field> {
    match v {
        Value::Null => Ok(Field::rational()),
        Value::Array(items) => {
            let coeffs = items
                .iter()
                .enumerate()
                .map(|(i, c)| rational_from_value(c, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Field::configure(&coeffs)
        }
        _ => Err(Error::parse(path, "expected null or an array of rationals")),
    }
}

fn rational_from_value(v: &Value, path: &str) -> Result<num_rational::BigRational> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|_| Error::parse(path, format!("bad rational {s:?}"))),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        _ => Err(Error::parse(path, "expected a \"num/den\" string")),
    }
}

pub fn element_to_value(e: &FieldElement) -> Value {
    let strings = e.to_strings();
    if strings.len() == 1 {
        Value::String(strings[0].clone())
    } else {
        json!(strings)
    }
}

pub fn element_from_value(field: &Field, v: &Value, path: &str) -> Result<FieldElement> {
    match v {
        Value::Array(items) => {
            if items.len() > field.degree() {
                return Err(Error::parse(
                    path,
                    format!("{} coordinates for a degree-{} field", items.len(), field.degree()),
                ));
            }
            let coords = items
                .iter()
                .enumerate()
                .map(|(i, c)| rational_from_value(c, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok(field.element(coords))
        }
        other => Ok(field.from_rational(rational_from_value(other, path)?)),
    }
}

pub fn poly_to_value(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(element_to_value).collect())
}

pub fn poly_from_value(field: &Field, v: &Value, path: &str) -> Result<Poly> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::parse(path, "expected an array of coefficients"))?;
    let coeffs = items
        .iter()
        .enumerate()
        .map(|(i, c)| element_from_value(field, c, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(field.clone(), coeffs))
}

pub fn map_to_value(f: &RationalMap) -> Value {
    json!({
        "field": field_to_value(f.field()),
        "num": poly_to_value(f.num()),
        "den": poly_to_value(f.den()),
    })
}

pub fn map_from_value(v: &Value, path: &str) -> Result<RationalMap> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::parse(path, "expected a map object {field, num, den}"))?;
    let field = field_from_value(obj.get("field").unwrap_or(&Value::Null), &format!("{path}.field"))?;
    let num = poly_from_value(
        &field,
        obj.get("num").ok_or_else(|| Error::parse(path, "missing \"num\""))?,
        &format!("{path}.num"),
    )?;
    let den = match obj.get("den") {
        Some(d) => poly_from_value(&field, d, &format!("{path}.den"))?,
        None => Poly::one(&field),
    };
    RationalMap::new(num, den).map_err(|e| Error::parse(path, e.to_string()))
}

/// Parses map JSON text; syntax errors carry line and column.
pub fn parse_map_json(text: &str) -> Result<RationalMap> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    map_from_value(&v, "$")
}

pub fn moebius_to_value(m: &Moebius) -> Value {
    let [a, b, c, d] = m.entries();
    json!({
        "a": element_to_value(a),
        "b": element_to_value(b),
        "c": element_to_value(c),
        "d": element_to_value(d),
        "map": m.to_string(),
    })
}

/// Coefficient matrix `[deg x][deg y]` of elements.
pub fn bipoly_to_value(p: &BiPoly) -> Value {
    Value::Array(
        p.matrix()
            .iter()
            .map(|row| Value::Array(row.iter().map(element_to_value).collect()))
            .collect(),
    )
}

pub fn point_to_value(p: &Point) -> Value {
    serde_json::to_value(p).expect("points serialize")
}

pub fn exact_point_to_value(p: &ExactPoint) -> Value {
    match p {
        ExactPoint::Infinity => Value::String("inf".into()),
        ExactPoint::Finite(x) => element_to_value(x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_over_extension() {
        let k = Field::eisenstein();
        let w = k.generator();
        let num = Poly::new(k.clone(), vec![k.one(), w.clone(), k.from_int(2)]);
        let den = Poly::new(k.clone(), vec![k.zero(), k.one()]);
        let f = RationalMap::new(num, den).unwrap();
        let v = map_to_value(&f);
        assert_eq!(v["field"], json!(["1/1", "1/1", "1/1"]));
        let back = map_from_value(&v, "$").unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rational_coefficients_are_strings() {
        let f = RationalMap::from_ints(&Field::rational(), &[0, -3, 0, 1], &[1]).unwrap();
        let v = map_to_value(&f);
        assert_eq!(v["num"], json!(["0/1", "-3/1", "0/1", "1/1"]));
        assert_eq!(v["field"], Value::Null);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_map_json("{\"num\": [1, \"x\"]}").unwrap_err();
        assert!(err.to_string().contains("$.num[1]"), "{err}");
        let err = parse_map_json("{\"num\": [1, 2").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        let err = parse_map_json("{\"num\": [1], \"den\": [2]}").unwrap_err();
        assert!(err.to_string().contains("constant"), "{err}");
    }
}
