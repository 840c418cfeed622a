//! JSON and CSV outputs. Every file is written atomically; JSON documents
//! carry a schema version and store non-finite numbers as `null`.

use std::path::PathBuf;

use serde_json::{Map, Value};

use crate::cache::write_atomic;
use crate::error::LabError;

pub const SCHEMA_VERSION: u32 = 1;

/// A finite number, or `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_bytes(&self) -> Result<Vec<u8>, LabError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(LabError::output)?;
        for r in &self.rows {
            w.write_record(r).map_err(LabError::output)?;
        }
        w.into_inner().map_err(|e| LabError::output(e.error()))
    }
}

/// Shortest round-tripping text of a float.
pub fn fmt(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone)]
pub struct Output {
    dir: PathBuf,
    json: bool,
    csv: bool,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: impl Into<PathBuf>, json: bool, csv: bool) -> Self {
        Output { dir: dir.into(), json, csv, written: Vec::new() }
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// `body` must be an object; `schema_version` and `command` are added.
    pub fn json(&mut self, name: &str, command: &str, body: Value) -> Result<(), LabError> {
        if !self.json {
            return Ok(());
        }
        let mut doc = Map::new();
        doc.insert("schema_version".into(), SCHEMA_VERSION.into());
        doc.insert("command".into(), command.into());
        match body {
            Value::Object(m) => doc.extend(m),
            other => {
                doc.insert("result".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).map_err(LabError::output)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<(), LabError> {
        if !self.csv {
            return Ok(());
        }
        let bytes = table.to_bytes()?;
        self.write(name, &bytes)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), LabError> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn non_finite_numbers_become_null() {
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(num(f64::INFINITY), Value::Null);
        assert_eq!(num(0.25), json!(0.25));
    }

    #[test]
    fn documents_carry_the_schema_version() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Output::new(dir.path(), true, true);
        out.json("a.json", "oracle", json!({ "x": num(f64::NAN) })).unwrap();
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
        assert_eq!(doc["schema_version"], json!(SCHEMA_VERSION));
        assert_eq!(doc["command"], json!("oracle"));
        assert!(doc["x"].is_null());
    }

    #[test]
    fn csv_round_trips_floats() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Output::new(dir.path(), false, true);
        let mut t = Table::new(&["k", "value"]);
        let x = 1.0 / 3.0;
        t.push(vec!["1".into(), fmt(x)]);
        out.csv("t.csv", &t).unwrap();
        let mut r = csv::Reader::from_path(dir.path().join("t.csv")).unwrap();
        let row = r.records().next().unwrap().unwrap();
        assert_eq!(row[1].parse::<f64>().unwrap().to_bits(), x.to_bits());
        assert_eq!(out.written().len(), 1);
    }
}
