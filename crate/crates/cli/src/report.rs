//! Report assembly and emission.
//!
//! JSON objects serialize with sorted keys; every float is rounded to 12
//! significant digits so identical runs print identical bytes.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use emcomm_core::games::Loss;
use serde_json::{json, Map, Value};

use crate::args::{Format, GlobalArgs, LogBase};

pub const SCHEMA: u64 = 1;

pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// Rounds every float in `v`.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n.as_f64().map_or(Value::Null, |f| json!(round12(f))),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn loss_value(l: Loss) -> Value {
    match l {
        Loss::Finite(v) => json!(v),
        Loss::Infinite => json!("inf"),
    }
}

/// Converts nats to the requested base.
pub fn info_scale(base: LogBase) -> f64 {
    match base {
        LogBase::Nats => 1.0,
        LogBase::Bits => 1.0 / std::f64::consts::LN_2,
    }
}

pub fn log_base_name(base: LogBase) -> &'static str {
    match base {
        LogBase::Nats => "nats",
        LogBase::Bits => "bits",
    }
}

/// A top-level report: `fields` plus schema, command and seed.
pub struct Report {
    pub name: String,
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(name: &str, global: &GlobalArgs) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), json!(SCHEMA));
        fields.insert("command".into(), json!(name));
        fields.insert("seed".into(), json!(global.seed));
        fields.insert("log_base".into(), json!(log_base_name(global.log_base)));
        Self {
            name: name.into(),
            fields,
        }
    }

    pub fn insert(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.insert(key.into(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn to_value(&self) -> Value {
        normalize(Value::Object(self.fields.clone()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("json values serialize");
        s.push('\n');
        s
    }

    /// One header line and one row over the scalar fields, in key order.
    pub fn to_csv(&self) -> String {
        let v = self.to_value();
        let mut keys = Vec::new();
        let mut cells = Vec::new();
        flatten("", &v, &mut keys, &mut cells);
        format!("{}\n{}\n", keys.join(","), cells.join(","))
    }

    /// Prints in the chosen format and writes `<name>.json` and
    /// `<name>.csv` under `--out`.
    pub fn emit(&self, global: &GlobalArgs) -> Result<()> {
        match global.format {
            Format::Json => print!("{}", self.to_json()),
            Format::Csv => print!("{}", self.to_csv()),
        }
        if let Some(dir) = &global.out {
            write_file(&dir.join(format!("{}.json", self.name)), &self.to_json())?;
            write_file(&dir.join(format!("{}.csv", self.name)), &self.to_csv())?;
        }
        Ok(())
    }
}

fn flatten(prefix: &str, v: &Value, keys: &mut Vec<String>, cells: &mut Vec<String>) {
    match v {
        Value::Object(o) => {
            for (k, child) in o {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, keys, cells);
            }
        }
        Value::Array(_) => {}
        Value::String(s) => {
            keys.push(prefix.into());
            cells.push(csv_cell(s));
        }
        Value::Null => {
            keys.push(prefix.into());
            cells.push(String::new());
        }
        other => {
            keys.push(prefix.into());
            cells.push(other.to_string());
        }
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json(path: &Path, value: Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(&normalize(value))?;
    s.push('\n');
    write_file(path, &s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_stable() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(-2.5e-20), -2.5e-20);
        assert_eq!(round12(0.0), 0.0);
    }

    #[test]
    fn csv_flattens_nested_objects() {
        let g = GlobalArgs {
            seed: 3,
            samples: 10,
            out: None,
            format: Format::Json,
            log_base: LogBase::Nats,
            log_level: "warn".into(),
        };
        let mut r = Report::new("demo", &g);
        r.insert("a", json!({"x": 1.0, "y": "u,v"}));
        let csv = r.to_csv();
        assert_eq!(csv, "a.x,a.y,command,log_base,schema,seed\n1.0,\"u,v\",demo,nats,1,3\n");
    }
}
