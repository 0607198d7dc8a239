//! Deterministic rendering of run records: JSON with fixed field order and every
//! float printed to 17 significant digits, and CSV with `#` comment headers.

use std::fmt::Write as _;

use serde_json::Value;

pub const SCHEMA_VERSION: &str = "corsol/1";

/// A finished command: the JSON record and the table used for CSV.
#[derive(Debug, Clone)]
pub struct Record {
    pub command: &'static str,
    pub coefficient_label: String,
    pub config_echo: Value,
    pub results: Value,
    pub evidence: Value,
    pub table: Table,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// `%.17g`: shortest of fixed and exponent notation, trailing zeros dropped, and
/// a `.0` kept on integral values so they still read as floats.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        let mut s = fixed.trim_end_matches('0').to_string();
        if s.ends_with('.') {
            s.push('0');
        } else if !s.contains('.') {
            s.push_str(".0");
        }
        s
    } else {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    }
}

fn number(n: &serde_json::Number) -> String {
    if let Some(i) = n.as_i64() {
        i.to_string()
    } else if let Some(u) = n.as_u64() {
        u.to_string()
    } else {
        format_float(n.as_f64().unwrap_or(f64::NAN))
    }
}

fn write_json(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat(' ').take(n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&number(n)),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_json(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, indent + 2);
                write_json(out, item, indent + 2);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(out, indent + 2);
                out.push_str(&serde_json::to_string(key).expect("keys serialize"));
                out.push_str(": ");
                write_json(out, item, indent + 2);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_json(&mut out, v, 0);
    out.push('\n');
    out
}

impl Record {
    pub fn envelope(&self) -> Value {
        serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "coefficient_label": self.coefficient_label,
            "config_echo": self.config_echo,
            "results": self.results,
            "evidence": self.evidence,
        })
    }

    pub fn render_json(&self) -> String {
        to_json(&self.envelope())
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::new();
        let mut echo = String::new();
        write_json(&mut echo, &self.config_echo, 0);
        let _ = writeln!(out, "# schema_version: {SCHEMA_VERSION}");
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# coefficient_label: {}", self.coefficient_label);
        for line in echo.lines() {
            let _ = writeln!(out, "# config: {line}");
        }
        out.push_str(&self.table.columns.join(","));
        out.push('\n');
        for row in &self.table.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => "nan".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => number(n),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => {
            let mut s = String::new();
            write_json(&mut s, other, 0);
            format!("\"{}\"", s.replace('"', "\"\""))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_float(0.1), "0.10000000000000001");
        assert_eq!(format_float(1.0), "1.0");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(1e-7), "9.9999999999999995e-8");
        assert_eq!(format_float(1e20), "1e20");
        assert_eq!(format_float(123456.0), "123456.0");
        assert_eq!(format_float(std::f64::consts::PI), "3.1415926535897931");
        for v in [0.1, 1e-300, 6.02e23, -7.25e-5, 2f64.sqrt()] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_layout_is_stable() {
        let v = json!({"b": 1.0, "a": [1, 2.5, null], "c": {"x": []}});
        assert_eq!(to_json(&v), "{\n  \"b\": 1.0,\n  \"a\": [1, 2.5, null],\n  \"c\": {\n    \"x\": []\n  }\n}\n");
    }

    #[test]
    fn csv_has_comment_header() {
        let mut table = Table::new(&["x", "d"]);
        table.push(vec![json!(-2.0), json!(1.0)]);
        table.push(vec![json!(0.5), Value::Null]);
        let r = Record {
            command: "dfun",
            coefficient_label: "constant_one".into(),
            config_echo: json!({"xs": "-2:2:0.5"}),
            results: Value::Null,
            evidence: Value::Null,
            table,
        };
        let csv = r.render_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[..3].iter().all(|l| l.starts_with('#')));
        assert!(lines.contains(&"x,d"));
        assert!(lines.contains(&"-2.0,1.0"));
        assert!(lines.contains(&"0.5,nan"));
    }
}
