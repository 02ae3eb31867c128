//! Experiment manifests, curve files and output rendering.

use std::path::Path;

use coin_duel::rational::{decimal_string, fraction_string, Rational};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// Everything needed to re-run a command and reproduce its output byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    pub engine_version: String,
}

/// Exact rational alongside its 15-significant-digit decimal expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactValue {
    pub exact: String,
    pub decimal: String,
}

impl ExactValue {
    pub fn of(value: &Rational) -> Self {
        Self {
            exact: fraction_string(value),
            decimal: decimal_string(value, 15),
        }
    }

    pub fn text(&self) -> String {
        if self.exact == self.decimal {
            self.exact.clone()
        } else {
            format!("{} = {}", self.exact, self.decimal)
        }
    }
}

/// Tabular sweep output. The first column is the abscissa; rows are kept
/// sorted by it (ties broken by the remaining columns).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CurveFile {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "curve row width");
        self.rows.push(row);
    }

    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.to_string()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }

    pub fn text_table(&self) -> String {
        let mut out = self.columns.join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.6}")).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_csv())
            .map_err(|e| CliError::Compute(anyhow::anyhow!("cannot write {}: {e}", path.display())))
    }
}

/// What a command produced, before rendering.
#[derive(Debug)]
pub struct Outcome {
    pub result: Value,
    pub text: String,
    pub curve: Option<CurveFile>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    manifest: &'a Manifest,
    result: &'a Value,
}

pub fn render_json(manifest: &Manifest, result: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&JsonReport { manifest, result })
        .expect("serializable report");
    s.push('\n');
    s
}

/// `field,value` rows for results that are not curves, with nested keys
/// joined by dots.
pub fn render_flat_csv(result: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", result, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["field", "value"]).expect("in-memory write");
    for (k, v) in rows {
        w.write_record([k, v]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
