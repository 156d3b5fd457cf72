//! Canonical JSON: sorted keys, floats with exactly six decimals, two-space
//! indentation, LF newlines and a trailing newline.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Number, Value};

pub const FLOAT_DECIMALS: usize = 6;

fn write_number(out: &mut String, n: &Number) {
    if let Some(i) = n.as_i64() {
        write!(out, "{i}").unwrap();
    } else if let Some(u) = n.as_u64() {
        write!(out, "{u}").unwrap();
    } else {
        let f = n.as_f64().expect("JSON numbers are finite");
        let s = format!("{f:.FLOAT_DECIMALS$}");
        // No negative zero after rounding.
        if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
            out.push_str(s.trim_start_matches('-'));
        } else {
            out.push_str(&s);
        }
    }
}

fn indent(out: &mut String, level: usize) {
    out.push('\n');
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_object(out: &mut String, map: &Map<String, Value>, level: usize) {
    if map.is_empty() {
        out.push_str("{}");
        return;
    }
    let mut keys: Vec<&String> = map.keys().collect();
    keys.sort();
    out.push('{');
    for (i, k) in keys.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        indent(out, level + 1);
        out.push_str(&serde_json::to_string(k).expect("strings serialize"));
        out.push_str(": ");
        write_value(out, &map[k], level + 1);
    }
    indent(out, level);
    out.push('}');
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        // Short scalar arrays (coordinates, id lists) stay on one line.
        Value::Array(items) if items.len() <= 8 && items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, level);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                indent(out, level + 1);
                write_value(out, item, level + 1);
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) => write_object(out, map, level),
    }
}

pub fn value_to_canonical(v: &Value) -> Vec<u8> {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out.into_bytes()
}

pub fn to_canonical<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, serde_json::Error> {
    Ok(value_to_canonical(&serde_json::to_value(value)?))
}

/// Structural equality with floats compared within half a unit of the last
/// written decimal.
pub fn values_close(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => match (x.as_f64(), y.as_f64()) {
            (Some(p), Some(q)) if x.is_f64() || y.is_f64() => {
                (p - q).abs() <= 5e-7 * (1.0 + p.abs().max(q.abs()) * 1e-9)
            }
            _ => x == y,
        },
        (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| values_close(p, q)),
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| values_close(v, w)))
        }
        _ => a == b,
    }
}
