use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rows for CSV output. Every command also has a JSON form of the same data.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// What a command hands back before it is wrapped into a report.
pub struct Outcome {
    pub results: Value,
    pub table: Table,
    /// False when an audited inequality or identity failed.
    pub pass: bool,
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub status: &'static str,
    pub results: Value,
    pub error: Option<String>,
    pub timing_ms: f64,
    pub version: &'static str,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            "ok" => 0,
            "audit_failed" => 2,
            _ => 1,
        }
    }

    pub fn emit(&self, format: Format, table: Option<&Table>, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                match table {
                    Some(t) if self.error.is_none() => {
                        w.write_record(&t.headers)?;
                        for row in &t.rows {
                            w.write_record(row)?;
                        }
                    }
                    _ => {
                        w.write_record(["status", "error"])?;
                        w.write_record([self.status, self.error.as_deref().unwrap_or("")])?;
                    }
                }
                w.flush()
            }
        }
    }
}

/// Flattens the scalar fields of a JSON object into `key,value` rows.
pub fn key_value_table(results: &Value) -> Table {
    let mut t = Table::new(&["key", "value"]);
    if let Value::Object(map) = results {
        for (k, v) in map {
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Array(_) | Value::Object(_) => continue,
                other => other.to_string(),
            };
            t.push(vec![k.clone(), text]);
        }
    }
    t
}

pub fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).unwrap_or_else(|e| json!({ "serialization_error": e.to_string() }))
}
