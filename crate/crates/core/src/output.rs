//! Metadata and fixed-format CSV/JSON emission. Identical inputs produce
//! identical bytes: floats are written with 17 significant digits in CSV and
//! as shortest round-trip decimals in JSON, lines end in LF.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub system: String,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub versions: BTreeMap<String, String>,
    /// Only present when explicitly requested; breaks byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Metadata {
    pub fn new(system: impl Into<String>, command: impl Into<String>) -> Self {
        let mut versions = BTreeMap::new();
        for module in ["words", "subshifts", "cocycle", "spectrum", "cli"] {
            versions.insert(module.to_string(), VERSION.to_string());
        }
        Metadata {
            system: system.into(),
            command: command.into(),
            parameters: BTreeMap::new(),
            versions,
            wall_time_s: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    /// One `# metadata: {...}` comment line.
    pub fn csv_header(&self) -> String {
        format!("# metadata: {}\n", serde_json::to_string(self).unwrap_or_default())
    }
}

/// 17 significant digits, scientific notation; `nan`, `inf`, `-inf` spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Builds a CSV document row by row.
#[derive(Debug, Clone, Default)]
pub struct CsvWriter {
    buf: String,
}

impl CsvWriter {
    pub fn new(meta: &Metadata, columns: &[&str]) -> Self {
        let mut buf = meta.csv_header();
        buf.push_str(&columns.join(","));
        buf.push('\n');
        CsvWriter { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = write!(self.buf, "{}", fields.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// `{"metadata": ..., <payload fields>}` pretty-printed with a trailing newline.
pub fn json_document<T: Serialize>(meta: &Metadata, payload: &T) -> Result<String> {
    let mut obj = serde_json::Map::new();
    obj.insert("metadata".into(), serde_json::to_value(meta)?);
    match serde_json::to_value(payload)? {
        Value::Object(fields) => obj.extend(fields),
        other => {
            obj.insert("data".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(obj))?;
    s.push('\n');
    Ok(s)
}
