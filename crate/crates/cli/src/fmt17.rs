//! Decimal rendering with 17 significant digits, so every `f64` written by
//! the CLI or the service parses back to the same bits.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Positional decimal with 17 significant digits; exponent notation only
/// outside 1e-20..1e21. Non-finite values become `null`.
pub fn fmt17(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0.0000000000000000".into();
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-20..21).contains(&exp) {
        return sci;
    }
    let (sign, mant) = mant.strip_prefix('-').map_or(("", mant), |m| ("-", m));
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}.0", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}

/// An `f64` that serializes through [`fmt17`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// Rewrites every float in a JSON value through [`fmt17`].
pub fn to_string_17<T: Serialize>(v: &T) -> serde_json::Result<String> {
    let value = serde_json::to_value(v)?;
    let mut out = String::new();
    write_value(&value, &mut out);
    Ok(out)
}

fn write_value(v: &serde_json::Value, out: &mut String) {
    use serde_json::Value::*;
    match v {
        Number(n) if n.is_f64() => out.push_str(&fmt17(n.as_f64().expect("f64"))),
        Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(x, out);
            }
            out.push(']');
        }
        Object(o) => {
            out.push('{');
            for (i, (k, x)) in o.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push(':');
                write_value(x, out);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}
