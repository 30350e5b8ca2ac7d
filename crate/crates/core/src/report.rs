//! Tabular result documents written as CSV or JSON.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
    Null,
}

impl Cell {
    /// CSV rendering; floats keep 17 significant digits.
    pub fn to_csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub code_version: String,
    /// Seconds since the epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub timestamp_unix: u64,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn now(seed: Option<u64>) -> Self {
        let timestamp_unix = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or_else(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
        Self {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub command: String,
    pub config: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Structured output that does not fit the table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
    pub provenance: Provenance,
}

impl ReportDocument {
    pub fn new<C: Serialize>(command: &str, config: &C, columns: &[&str], seed: Option<u64>) -> Result<Self> {
        Ok(Self {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            details: None,
            provenance: Provenance::now(seed),
        })
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cell at `row` in the named column.
    pub fn cell(&self, row: usize, name: &str) -> Option<&Cell> {
        self.rows.get(row)?.get(self.column(name)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv_field))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportDocument {
        let mut doc = ReportDocument::new("demo", &serde_json::json!({"a": 1}), &["x", "ok", "note"], Some(7)).unwrap();
        doc.push_row(vec![0.1.into(), true.into(), "first".into()]);
        doc.push_row(vec![1.0.into(), false.into(), Cell::Null]);
        doc.push_row(vec![(1.0f64 / 3.0).into(), true.into(), "a, b".into()]);
        doc
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let doc = sample();
        let back = ReportDocument::from_json_str(&doc.to_json_string().unwrap()).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn csv_keeps_full_precision() {
        let doc = sample();
        let text = doc.to_csv_string().unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,ok,note"));
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let xs: Vec<f64> = r.records().map(|rec| rec.unwrap()[0].parse().unwrap()).collect();
        let want: Vec<f64> = doc.rows.iter().map(|row| row[0].as_f64().unwrap()).collect();
        assert_eq!(xs, want);
        assert!(text.contains("\"a, b\""));
    }

    #[test]
    fn source_date_epoch_is_not_required() {
        assert_eq!(Provenance::now(None).code_version, env!("CARGO_PKG_VERSION"));
    }
}
