//! Tabular report documents and their CSV / JSON forms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result};

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Empty,
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    /// CSV text; floats carry 17 significant digits.
    pub fn to_field(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    /// Inverse of [`Cell::to_field`].
    pub fn from_field(field: &str) -> Self {
        if field.is_empty() {
            return Cell::Empty;
        }
        if let Ok(v) = field.parse::<i64>() {
            return Cell::Int(v);
        }
        let looks_numeric = field
            .trim_start_matches(['-', '+'])
            .starts_with(|c: char| c.is_ascii_digit() || c == '.' || c == 'i' || c == 'N');
        match field.parse::<f64>() {
            Ok(v) if looks_numeric => Cell::Float(v),
            _ => Cell::Text(field.to_string()),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
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

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub tolerances: BTreeMap<String, f64>,
    /// Free-form summary values (counts, limits) that do not fit the table.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, Value>,
}

impl Default for Meta {
    fn default() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances: BTreeMap::new(),
            notes: BTreeMap::new(),
        }
    }
}

/// Output of one command: the inputs, a fixed-order table and metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Meta,
}

impl ReportDocument {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            params: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta: Meta::default(),
        }
    }

    pub fn param(&mut self, name: &str, value: impl Serialize) -> &mut Self {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn tolerance(&mut self, name: &str, value: f64) -> &mut Self {
        self.meta.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn note(&mut self, name: &str, value: impl Serialize) -> &mut Self {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.meta.notes.insert(name.to_string(), value);
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(
            row.len(),
            self.columns.len(),
            "row width differs from header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Header row followed by one line per row.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::to_field))?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Parses CSV produced by [`ReportDocument::to_csv`] into header and rows.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<Cell>>)> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let columns = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record?.iter().map(Cell::from_field).collect());
    }
    Ok((columns, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_round_trip() {
        for cell in [
            Cell::Empty,
            Cell::Int(-3),
            Cell::Int(199),
            Cell::Float(0.1),
            Cell::Float(1.0),
            Cell::Float(-2.5e-300),
            Cell::Float(f64::MAX),
            Cell::Float(f64::INFINITY),
            Cell::Text("log_upper".into()),
            Cell::Text("pass".into()),
            Cell::Text("n=3,k=1".into()),
        ] {
            assert_eq!(Cell::from_field(&cell.to_field()), cell);
        }
        assert_eq!(Cell::Float(0.1).to_field(), "1.0000000000000001e-1");
    }

    #[test]
    fn csv_round_trip() {
        let mut doc = ReportDocument::new("test", &["a", "b", "c"]);
        doc.push_row(vec![1u64.into(), (1.0f64 / 3.0).into(), "x,y".into()]);
        doc.push_row(vec![Cell::Empty, std::f64::consts::PI.into(), "z".into()]);
        let (columns, rows) = parse_csv(&doc.to_csv().unwrap()).unwrap();
        assert_eq!(columns, doc.columns);
        assert_eq!(rows, doc.rows);
    }

    #[test]
    fn json_round_trip() {
        let mut doc = ReportDocument::new("test", &["a", "b"]);
        doc.param("N", 200u64)
            .tolerance("slack", 1e-10)
            .note("count", 78);
        doc.push_row(vec![Cell::Float(0.063_761_016_135_956_16), Cell::Empty]);
        doc.push_row(vec![Cell::Int(4), Cell::Text("t".into())]);
        let back = ReportDocument::from_json(&doc.to_json().unwrap()).unwrap();
        assert_eq!(back, doc);
    }
}
