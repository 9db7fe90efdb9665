//! Output rounding: every number printed by the CLI and every report carries
//! nine significant digits.

use serde_json::Value;

pub const SIG_DIGITS: usize = 9;

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Human-readable form with nine significant digits and no trailing noise.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r = round_sig(x);
    let a = r.abs();
    if a != 0.0 && !(1e-4..1e9).contains(&a) {
        format!("{:e}", r)
    } else {
        format!("{}", r)
    }
}

/// Applies [`round_sig`] to every float inside a JSON value.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with rounded floats.
pub fn to_json_string<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    serde_json::to_string_pretty(&round_json(serde_json::to_value(value)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(round_sig(2.0 / 3.0), 0.666666667);
        assert_eq!(fmt_num(std::f64::consts::E), "2.71828183");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(1.234567891234e-7), "1.23456789e-7");
        assert_eq!(round_sig(0.0), 0.0);
        let v = round_json(serde_json::json!({"a": [1.0 / 7.0, 3], "b": "x"}));
        assert_eq!(v, serde_json::json!({"a": [0.142857143, 3], "b": "x"}));
    }
}
