//! Result tables and their CSV / JSON serializations.

use conewave_core::rational::format_ratio;
use conewave_core::Rational;
use serde_json::{Map, Value as Json};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    UInt(u64),
    Float(f64),
    Rational(Rational),
    Bool(bool),
    Text(String),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Self::Int(_) => "int",
            Self::UInt(_) => "uint",
            Self::Float(_) => "float",
            Self::Rational(_) => "rational",
            Self::Bool(_) => "bool",
            Self::Text(_) => "text",
        }
    }

    /// 17 significant digits for floats, `num/den` for rationals.
    pub fn to_csv(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::UInt(v) => v.to_string(),
            Self::Float(v) if v.is_nan() => "NaN".into(),
            Self::Float(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Self::Float(v) => format!("{v:.16e}"),
            Self::Rational(q) => format_ratio(q),
            Self::Bool(b) => b.to_string(),
            Self::Text(s) if s.contains([',', '"', '\n', '\r']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Self::Text(s) => s.clone(),
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Self::Int(v) => Json::from(*v),
            Self::UInt(v) => Json::from(*v),
            Self::Float(v) => serde_json::Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Self::Rational(q) => Json::String(format_ratio(q)),
            Self::Bool(b) => Json::Bool(*b),
            Self::Text(s) => Json::String(s.clone()),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Self::Int(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Self::UInt(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<Rational> for Value {
    fn from(v: Rational) -> Self {
        Self::Rational(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// A homogeneous table: fixed columns, and every column holds one value kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

pub type Record = Vec<(String, Value)>;

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    fn schema_error(&self, message: String) -> CliError {
        CliError::Schema {
            table: self.name.clone(),
            message,
        }
    }

    pub fn push(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(self.schema_error(format!(
                "row has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(first) = self.rows.first() {
            for ((a, b), col) in first.iter().zip(&row).zip(&self.columns) {
                if a.kind() != b.kind() {
                    return Err(self.schema_error(format!("column `{col}` mixes {} and {}", a.kind(), b.kind())));
                }
            }
        }
        self.rows.push(row);
        Ok(())
    }

    /// Builds a table from keyed records, rejecting records whose keys or kinds differ.
    pub fn from_records(name: &str, columns: &[&str], records: Vec<Record>) -> Result<Self> {
        let mut t = Self::new(name, columns);
        for rec in records {
            let keys: Vec<&str> = rec.iter().map(|(k, _)| k.as_str()).collect();
            if keys != columns {
                return Err(t.schema_error(format!("record keys {keys:?} differ from {columns:?}")));
            }
            t.push(rec.into_iter().map(|(_, v)| v).collect())?;
        }
        Ok(t)
    }

    /// Header plus one line per row, LF terminated.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Value::to_csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn record_json(&self, row: &[Value]) -> Json {
        let map: Map<String, Json> = self
            .columns
            .iter()
            .cloned()
            .zip(row.iter().map(Value::to_json))
            .collect();
        Json::Object(map)
    }

    /// A JSON array with one object per line; `serde_json` maps keep keys sorted.
    pub fn to_json(&self) -> String {
        let lines: Vec<String> = self.rows.iter().map(|r| self.record_json(r).to_string()).collect();
        if lines.is_empty() {
            "[]\n".into()
        } else {
            format!("[\n{}\n]\n", lines.join(",\n"))
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// The serialized payload of each record, used for per-record checksums.
    pub fn record_lines(&self, format: Format) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| match format {
                Format::Csv => r.iter().map(Value::to_csv).collect::<Vec<_>>().join(","),
                Format::Json => self.record_json(r).to_string(),
            })
            .collect()
    }
}
