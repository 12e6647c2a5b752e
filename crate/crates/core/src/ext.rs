//! Extended-real formatting shared by the JSON and CSV writers.

use serde_json::Value;

/// `inf`, `-inf`, `nan` or the shortest round-trip decimal.
pub fn format(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x}")
    }
}

/// A JSON number for finite values, otherwise the string from [`format`].
pub fn to_json(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(format(x))
    }
}

/// Inverse of [`format`].
pub fn parse(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}
