//! Canonical JSON: lexicographic keys, floats rounded to 12 significant digits.

use serde::Serialize;
use serde_json::Value;

/// Significant digits kept for every float in a report.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds `x` to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Rounds floats in place. Objects are already key-sorted because
/// `serde_json::Map` is a `BTreeMap` here.
pub fn canonicalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

pub fn to_canonical_value<T: Serialize + ?Sized>(value: &T) -> Value {
    let mut v = serde_json::to_value(value).expect("report types serialise");
    canonicalize(&mut v);
    v
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(&to_canonical_value(value)).expect("value serialises");
    s.push('\n');
    s
}

/// A float as it appears in canonical output, for CSV and text.
pub fn format_float(x: f64) -> String {
    round_sig(x).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(4.0 + 14.0 * 0.014), 4.196);
        assert_eq!(round_sig(0.9999999999999998), 1.0);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-2.5e-20), -2.5e-20);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(format_float(4.5), "4.5");
    }

    #[test]
    fn keys_sorted_and_floats_rounded() {
        let v = json!({"b": 0.30000000000000004, "a": [1, 2.0000000000000004], "c": {"z": 1, "y": null}});
        assert_eq!(
            serde_json::to_string(&to_canonical_value(&v)).unwrap(),
            r#"{"a":[1,2.0],"b":0.3,"c":{"y":null,"z":1}}"#
        );
    }
}
