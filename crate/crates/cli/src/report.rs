//! Tabular reports written as CSV or JSON, one config hash per row.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::Failure;

#[derive(Debug, Clone)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// Floats carry 17 significant digits so they round-trip.
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(v) => Value::from(v.as_str()),
        }
    }
}

pub struct Report {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(header: &[&'static str]) -> Self {
        Report { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_bytes(&self, format: Format, hash: &str) -> Result<Vec<u8>, Failure> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Failure::Io(e.to_string());
                w.write_record(self.header.iter().copied().chain(["config_hash"])).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv).chain([hash.to_string()])).map_err(io)?;
                }
                w.into_inner().map_err(|e| Failure::Io(e.to_string()))
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj: Map<String, Value> = self.header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                        obj.insert("config_hash".into(), Value::from(hash));
                        Value::Object(obj)
                    })
                    .collect();
                let mut out = serde_json::to_vec_pretty(&rows).map_err(|e| Failure::Io(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }

    pub fn emit(&self, format: Format, hash: &str, path: Option<&Path>) -> Result<(), Failure> {
        let bytes = self.to_bytes(format, hash)?;
        let result = match path {
            Some(p) => std::fs::write(p, &bytes),
            None => std::io::stdout().lock().write_all(&bytes),
        };
        result.map_err(|e| Failure::Io(e.to_string()))
    }
}
