//! Report documents written by the command-line front end.
//!
//! A report is a tree of [`Value`]s emitted either as TOML or as JSON. Floats
//! are always written with 17 significant digits (`{:.16e}`), which parses
//! back to the identical `f64`. Complex numbers are `[re, im]` pairs and
//! matrices are row-major lists of rows.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::linalg::CMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Bool(bool),
    Str(String),
    List(Vec<Value>),
    Table(Table),
}

/// Insertion-ordered table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table(Vec<(String, Value)>);

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<Value>) -> &mut Self {
        self.0.push((key.into(), value.into()));
        self
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.insert(key, value);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.0
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Str(x.to_owned())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Str(x)
    }
}

impl From<Table> for Value {
    fn from(t: Table) -> Self {
        Value::Table(t)
    }
}

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(items: Vec<T>) -> Self {
        Value::List(items.into_iter().map(Into::into).collect())
    }
}

impl From<Complex64> for Value {
    fn from(z: Complex64) -> Self {
        Value::List(vec![Value::Float(z.re), Value::Float(z.im)])
    }
}

pub fn complex_vector<'a>(values: impl IntoIterator<Item = &'a Complex64>) -> Value {
    Value::List(values.into_iter().map(|z| Value::from(*z)).collect())
}

pub fn matrix(m: &CMatrix) -> Value {
    Value::List((0..m.nrows()).map(|r| complex_vector(m.row(r).iter())).collect())
}

pub fn real_matrix(rows: &[Vec<f64>]) -> Value {
    Value::List(rows.iter().map(|r| Value::from(r.clone())).collect())
}

fn format_float(x: f64, nan: &str, inf: &str) -> String {
    if x.is_nan() {
        nan.to_owned()
    } else if x.is_infinite() {
        format!("{}{inf}", if x < 0.0 { "-" } else { "" })
    } else {
        format!("{x:.16e}")
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn toml_key(key: &str) -> String {
    if !key.is_empty() && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        key.to_owned()
    } else {
        quote(key)
    }
}

fn is_table_list(v: &Value) -> bool {
    matches!(v, Value::List(items) if !items.is_empty() && items.iter().all(|i| matches!(i, Value::Table(_))))
}

fn toml_inline(v: &Value, out: &mut String) {
    match v {
        Value::Float(x) => out.push_str(&format_float(*x, "nan", "inf")),
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Str(s) => out.push_str(&quote(s)),
        Value::List(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                toml_inline(item, out);
            }
            out.push(']');
        }
        Value::Table(t) => {
            out.push('{');
            for (k, (key, item)) in t.0.iter().enumerate() {
                out.push_str(if k > 0 { ", " } else { " " });
                out.push_str(&toml_key(key));
                out.push_str(" = ");
                toml_inline(item, out);
            }
            out.push_str(" }");
        }
    }
}

/// Nested lists (matrices) go one row per line.
fn toml_value(v: &Value, out: &mut String) {
    match v {
        Value::List(items) if items.iter().any(|i| matches!(i, Value::List(_))) => {
            out.push_str("[\n");
            for item in items {
                out.push_str("  ");
                toml_inline(item, out);
                out.push_str(",\n");
            }
            out.push(']');
        }
        other => toml_inline(other, out),
    }
}

fn toml_table(table: &Table, path: &str, out: &mut String) {
    for (key, v) in &table.0 {
        if matches!(v, Value::Table(_)) || is_table_list(v) {
            continue;
        }
        out.push_str(&toml_key(key));
        out.push_str(" = ");
        toml_value(v, out);
        out.push('\n');
    }
    for (key, v) in &table.0 {
        let child = if path.is_empty() { toml_key(key) } else { format!("{path}.{}", toml_key(key)) };
        match v {
            Value::Table(t) => {
                let _ = write!(out, "\n[{child}]\n");
                toml_table(t, &child, out);
            }
            Value::List(items) if is_table_list(v) => {
                for item in items {
                    let Value::Table(t) = item else { unreachable!() };
                    let _ = write!(out, "\n[[{child}]]\n");
                    toml_table(t, &child, out);
                }
            }
            _ => {}
        }
    }
}

pub fn to_toml(table: &Table) -> String {
    let mut out = String::new();
    toml_table(table, "", &mut out);
    out
}

fn json_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Float(x) => out.push_str(&format_float(*x, "null", "null")),
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Value::Str(s) => out.push_str(&quote(s)),
        Value::List(items) => {
            if items.iter().any(|i| matches!(i, Value::Table(_))) {
                out.push_str("[\n");
                for (k, item) in items.iter().enumerate() {
                    out.push_str(&"  ".repeat(indent + 1));
                    json_value(item, indent + 1, out);
                    out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            } else {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    json_value(item, indent, out);
                }
                out.push(']');
            }
        }
        Value::Table(t) => {
            out.push_str("{\n");
            for (k, (key, item)) in t.0.iter().enumerate() {
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&quote(key));
                out.push_str(": ");
                json_value(item, indent + 1, out);
                out.push_str(if k + 1 < t.0.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// Pretty JSON with one key per line.
pub fn to_json(table: &Table) -> String {
    let mut out = String::new();
    json_value(&Value::Table(table.clone()), 0, &mut out);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Table {
        let inner = Table::new().with("fidelity", 0.1 + 0.2).with("decoded", vec![0usize, 1]);
        Table::new()
            .with("name", "a \"quoted\" name")
            .with("flag", true)
            .with("z", Complex64::new(-1.5e-300, 3.0))
            .with("m", matrix(&CMatrix::identity(2, 2)))
            .with("nested", Table::new().with("x", 1usize))
            .with("runs", vec![inner.clone(), inner])
    }

    #[test]
    fn toml_output_parses() {
        let text = to_toml(&sample());
        let parsed: toml::Table = toml::from_str(&text).unwrap();
        assert_eq!(parsed["name"].as_str(), Some("a \"quoted\" name"));
        assert_eq!(parsed["runs"].as_array().unwrap().len(), 2);
        assert_eq!(parsed["runs"][0]["fidelity"].as_float(), Some(0.1 + 0.2));
        assert_eq!(parsed["m"][1][1][0].as_float(), Some(1.0));
        assert_eq!(parsed["z"][0].as_float(), Some(-1.5e-300));
    }

    #[test]
    fn json_output_parses() {
        let text = to_json(&sample());
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["runs"][1]["decoded"][1], 1);
        assert_eq!(parsed["nested"]["x"], 1);
        assert_eq!(parsed["runs"][0]["fidelity"].as_f64(), Some(0.1 + 0.2));
    }

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(format_float(0.1, "nan", "inf"), "1.0000000000000001e-1");
        assert_eq!(format_float(1.0, "nan", "inf"), "1.0000000000000000e0");
    }

    proptest! {
        #[test]
        fn floats_round_trip_through_both_formats(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let t = Table::new().with("x", x);
            let from_toml: toml::Table = toml::from_str(&to_toml(&t)).unwrap();
            prop_assert_eq!(from_toml["x"].as_float().unwrap().to_bits(), x.to_bits());
            let from_json: serde_json::Value = serde_json::from_str(&to_json(&t)).unwrap();
            prop_assert_eq!(from_json["x"].as_f64().unwrap(), x);
        }
    }
}
