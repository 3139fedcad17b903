//! JSON and CSV rendering. Numbers use the shortest decimal form that
//! parses back to the same `f64`; non-finite values are refused.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{Map, Number, Value};

/// Raised when a report would contain NaN or an infinity.
#[derive(Debug)]
pub struct NonFinite(pub String);

impl std::fmt::Display for NonFinite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "non-finite value in field `{}`", self.0)
    }
}

impl std::error::Error for NonFinite {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// An ordered JSON object under construction.
#[derive(Debug, Default, Clone)]
pub struct Record(Map<String, Value>);

impl Record {
    pub fn new() -> Self {
        Record(Map::new())
    }

    pub fn num(mut self, key: &str, x: f64) -> Result<Self> {
        self.0.insert(key.into(), number(key, x)?);
        Ok(self)
    }

    pub fn int(mut self, key: &str, n: usize) -> Self {
        self.0.insert(key.into(), Value::from(n));
        self
    }

    pub fn text(mut self, key: &str, s: impl Into<String>) -> Self {
        self.0.insert(key.into(), Value::String(s.into()));
        self
    }

    pub fn flag(mut self, key: &str, b: bool) -> Self {
        self.0.insert(key.into(), Value::Bool(b));
        self
    }

    pub fn value(mut self, key: &str, v: Value) -> Self {
        self.0.insert(key.into(), v);
        self
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

pub fn number(key: &str, x: f64) -> Result<Value> {
    match Number::from_f64(x) {
        Some(n) => Ok(Value::Number(n)),
        None => Err(NonFinite(key.to_string()).into()),
    }
}

/// A CSV cell for a JSON value: strings raw, null empty, containers as
/// compact JSON.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn json_text(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// CSV with the given header; each row is a list of JSON values.
pub fn csv_text(header: &[&str], rows: &[Vec<Value>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            bail!("row has {} cells, header has {}", row.len(), header.len());
        }
        w.write_record(row.iter().map(cell))?;
    }
    let bytes = w.into_inner().context("flushing CSV buffer")?;
    Ok(String::from_utf8(bytes)?)
}

/// A single record as a one-row CSV table.
pub fn record_csv(r: &Value) -> Result<String> {
    let Value::Object(map) = r else {
        bail!("CSV output needs an object");
    };
    let header: Vec<&str> = map.keys().map(String::as_str).collect();
    csv_text(&header, &[map.values().cloned().collect()])
}

/// Writes `text` to `out`, or to standard output when `out` is `None`.
pub fn write_out(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
