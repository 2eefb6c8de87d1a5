//! JSON and CSV emission with every float written to 17 significant digits.

use serde_json::Value;

/// `x` with 17 significant digits, trailing zeros of the fraction trimmed;
/// positional between 1e-5 and 1e17, scientific otherwise. Non-finite values
/// become `null` in JSON and the bare token in CSV.
pub fn format_f64(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_fraction(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_fraction(mantissa.to_string()), exp)
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return format!("{s}.0");
    }
    let t = s.trim_end_matches('0');
    if t.ends_with('.') {
        format!("{t}0")
    } else {
        t.to_string()
    }
}

/// Pretty-printed JSON whose floats go through [`format_f64`].
pub fn to_json_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(value: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match value {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&value.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("f64 number");
                if x.is_finite() {
                    out.push_str(&format_f64(x));
                } else {
                    out.push_str("null");
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, v)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(v, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// One CSV cell; floats through [`format_f64`], strings quoted when needed.
pub fn csv_cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => format_f64(n.as_f64().expect("f64 number")),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Header plus rows; every row is written with the header's columns.
pub fn to_csv(header: &[&str], rows: &[Vec<Value>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(csv_cell).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(0.24), "0.23999999999999999");
        assert_eq!(format_f64(1.0), "1.0");
        assert_eq!(format_f64(-2.5), "-2.5");
        assert_eq!(format_f64(1e-7), "9.9999999999999995e-8");
        assert_eq!(format_f64(0.0), "0.0");
        assert_eq!(format_f64(123456.0), "123456.0");
    }

    #[test]
    fn json_floats_use_full_precision() {
        let s = to_json_string(&json!({"lambda": 0.24, "p": 5, "name": "x", "rows": [], "none": null}));
        assert!(s.contains("\"lambda\": 0.23999999999999999"));
        assert!(s.contains("\"p\": 5"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["lambda"].as_f64().unwrap(), 0.24);
    }

    #[test]
    fn csv_quotes_strings() {
        let s = to_csv(&["a", "b"], &[vec![json!("x,y"), json!(0.5)]]);
        assert_eq!(s, "a,b\n\"x,y\",0.5\n");
    }

    proptest! {
        #[test]
        fn formatted_floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = format_f64(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
