use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{HarnessError, Result};
use crate::formats::{read_text, write_text};

pub type Metrics = BTreeMap<String, Value>;

/// Outcome of one experiment. Fields serialize in declaration order and
/// metrics in key order, so equal runs give equal bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub suite: String,
    pub config: Value,
    pub seed: u64,
    pub metrics: Metrics,
    pub pass: bool,
    pub artifacts: Vec<String>,
}

/// A suite run: the per-seed reports in seed order plus aggregate metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub metrics: Metrics,
    pub trials: Vec<Report>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value))
}

pub fn read_report(path: &Path) -> Result<Report> {
    parse_json(path, &read_text(path)?)
}

pub fn read_suite_report(path: &Path) -> Result<SuiteReport> {
    parse_json(path, &read_text(path)?)
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| HarnessError::Format { path: path.to_path_buf(), line: e.line(), reason: e.to_string() })
}

/// Metric insertion helpers; non-finite floats become strings so they
/// survive JSON.
pub trait MetricsExt {
    fn num(&mut self, key: &str, v: f64);
    fn int(&mut self, key: &str, v: usize);
    fn flag(&mut self, key: &str, v: bool);
    fn text(&mut self, key: &str, v: impl Into<String>);
    fn opt_int(&mut self, key: &str, v: Option<usize>);
    fn list(&mut self, key: &str, v: &[f64]);
}

pub fn float_value(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::from(format!("{v}"))
    }
}

impl MetricsExt for Metrics {
    fn num(&mut self, key: &str, v: f64) {
        self.insert(key.to_string(), float_value(v));
    }
    fn int(&mut self, key: &str, v: usize) {
        self.insert(key.to_string(), Value::from(v));
    }
    fn flag(&mut self, key: &str, v: bool) {
        self.insert(key.to_string(), Value::from(v));
    }
    fn text(&mut self, key: &str, v: impl Into<String>) {
        self.insert(key.to_string(), Value::from(v.into()));
    }
    fn opt_int(&mut self, key: &str, v: Option<usize>) {
        self.insert(key.to_string(), v.map_or(Value::Null, Value::from));
    }
    fn list(&mut self, key: &str, v: &[f64]) {
        self.insert(key.to_string(), Value::Array(v.iter().map(|x| float_value(*x)).collect()));
    }
}
