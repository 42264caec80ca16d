//! Report and plot-data output. JSON is written by hand from a
//! `serde_json::Value` so that floats always carry 17 significant digits and
//! object keys come out sorted.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::error::Error;
use crate::ode::GridFunction;

use super::{Mode, Status};

pub const SCHEMA: &str = "hardy-report/1";

/// The top-level object of every report.
pub fn envelope(mode: Mode, status: Status, seed: u64, result: Value) -> Value {
    serde_json::json!({
        "schema": SCHEMA,
        "mode": mode.name(),
        "status": status.name(),
        "exit_code": status.exit_code(),
        "seed": seed,
        "result": result,
    })
}

/// Deterministic pretty JSON: sorted keys, floats as `{:.16e}`, two-space indent.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                match n.as_f64() {
                    Some(x) if x.is_finite() => {
                        let _ = write!(out, "{x:.16e}");
                    }
                    _ => out.push_str("null"),
                }
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, depth + 1);
                write_value(out, item, depth + 1);
            }
            newline(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, depth + 1);
                out.push_str(&serde_json::to_string(k).expect("strings serialize"));
                out.push_str(": ");
                write_value(out, &map[k.as_str()], depth + 1);
            }
            newline(out, depth);
            out.push('}');
        }
    }
}

fn newline(out: &mut String, depth: usize) {
    out.push('\n');
    for _ in 0..depth {
        out.push_str("  ");
    }
}

pub fn emit_report(report: &Value, path: &Path) -> Result<(), Error> {
    std::fs::write(path, to_json_string(report))?;
    Ok(())
}

/// Parses `text` and checks the envelope: schema tag, known mode and status,
/// an exit code consistent with the status, and an object `result`.
pub fn validate_report(text: &str) -> Result<Value, Error> {
    let v: Value = serde_json::from_str(text)?;
    let bad = |what: &str| Error::invalid(format!("report: {what}"));
    let obj = v.as_object().ok_or_else(|| bad("top level is not an object"))?;
    if obj.get("schema").and_then(Value::as_str) != Some(SCHEMA) {
        return Err(bad("missing or wrong schema tag"));
    }
    let mode = obj.get("mode").and_then(Value::as_str).ok_or_else(|| bad("no mode"))?;
    if Mode::from_name(mode).is_none() {
        return Err(bad(&format!("unknown mode `{mode}`")));
    }
    let status = obj
        .get("status")
        .and_then(Value::as_str)
        .and_then(Status::from_name)
        .ok_or_else(|| bad("missing or unknown status"))?;
    if obj.get("exit_code").and_then(Value::as_i64) != Some(status.exit_code() as i64) {
        return Err(bad("exit_code disagrees with status"));
    }
    if obj.get("seed").and_then(Value::as_u64).is_none() {
        return Err(bad("no seed"));
    }
    if !obj.get("result").is_some_and(Value::is_object) {
        return Err(bad("result is not an object"));
    }
    let allowed = ["schema", "mode", "status", "exit_code", "seed", "result"];
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(bad(&format!("unexpected key `{k}`")));
    }
    Ok(v)
}

/// A sampled function for plotting: abscissa name (`t` or `r`), values and,
/// where available, derivatives.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub x: &'static str,
    pub rows: Vec<(f64, f64, Option<f64>)>,
}

impl Table {
    pub fn from_grid(name: &str, g: &GridFunction) -> Table {
        let d = g.derivs();
        Table {
            name: name.to_string(),
            x: "t",
            rows: g
                .nodes()
                .iter()
                .zip(g.values())
                .enumerate()
                .map(|(i, (&t, &v))| (t, v, d.map(|d| d[i])))
                .collect(),
        }
    }

    /// Samples `f` at `xs`, skipping points where it cannot be evaluated.
    pub fn sampled(
        name: &str,
        x: &'static str,
        xs: &[f64],
        f: impl Fn(f64) -> Option<(f64, Option<f64>)>,
    ) -> Table {
        Table {
            name: name.to_string(),
            x,
            rows: xs.iter().filter_map(|&t| f(t).map(|(v, d)| (t, v, d))).collect(),
        }
    }
}

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

pub fn write_csv(table: &Table, dir: &Path) -> Result<(), Error> {
    let path = dir.join(format!("{}.csv", table.name));
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    w.write_record([table.x, "value", "derivative"]).map_err(csv_err)?;
    for &(x, v, d) in &table.rows {
        w.write_record([fmt(x), fmt(v), d.map(fmt).unwrap_or_default()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::invalid(format!("csv: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits_and_keys_sort() {
        let v = serde_json::json!({"b": 0.1, "a": [1, f64::NAN], "c": {"z": true, "y": null}});
        let s = to_json_string(&v);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        let (ia, ib, ic) = (s.find("\"a\"").unwrap(), s.find("\"b\"").unwrap(), s.find("\"c\"").unwrap());
        assert!(ia < ib && ib < ic);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
        assert!(back["a"][1].is_null());
    }

    #[test]
    fn envelope_validates() {
        let e = envelope(Mode::Verify1d, Status::Inconclusive, 7, serde_json::json!({"verdict": "inconclusive"}));
        let s = to_json_string(&e);
        assert!(s.contains("\"verdict\": \"inconclusive\""));
        validate_report(&s).unwrap();
        let tampered = s.replace("\"exit_code\": 3", "\"exit_code\": 0");
        assert!(validate_report(&tampered).is_err());
    }

    #[test]
    fn csv_columns() {
        let dir = std::env::temp_dir().join(format!("hardy-csv-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let t = Table {
            name: "f".into(),
            x: "r",
            rows: vec![(1.0, 2.0, None), (2.0, 3.0, Some(0.5))],
        };
        write_csv(&t, &dir).unwrap();
        let text = std::fs::read_to_string(dir.join("f.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("r,value,derivative"));
        assert_eq!(lines.next(), Some("1.0000000000000000e0,2.0000000000000000e0,"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
