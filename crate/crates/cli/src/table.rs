use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Numeric table plus free-form metadata.
///
/// CSV output is the bare table with a one-line header; the metadata goes
/// to a `<out>.meta.json` sidecar, or to stderr when writing to stdout.
/// JSON output embeds both.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Value,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            metadata: json!({}),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_cell(*v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|v| json_number(*v)).collect()))
            .collect();
        json!({
            "columns": self.columns,
            "rows": rows,
            "metadata": self.metadata,
        })
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
        match (format, out) {
            (Format::Csv, Some(path)) => {
                self.write_csv(File::create(path)?)?;
                write_json(&sidecar_path(path), &self.metadata)?;
            }
            (Format::Csv, None) => {
                self.write_csv(io::stdout().lock())?;
                eprintln!("{}", serde_json::to_string(&self.metadata)?);
            }
            (Format::Json, Some(path)) => write_json(path, &self.to_json())?,
            (Format::Json, None) => {
                let mut out = io::stdout().lock();
                serde_json::to_writer_pretty(&mut out, &self.to_json())?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn write_json(path: &Path, value: &Value) -> anyhow::Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}

// Rust's shortest round-trip formatting; NaN cells are written empty.
fn format_cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_values_exactly() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![0.1 + 0.2, 1e-300]);
        t.push(vec![f64::NAN, -3.0]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("a,b"));
        let first: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(first, vec![0.1 + 0.2, 1e-300]);
        assert_eq!(lines.next(), Some(",-3"));
    }

    #[test]
    fn json_nan_becomes_null() {
        let mut t = Table::new(vec!["x"]);
        t.push(vec![f64::NAN]);
        assert_eq!(t.to_json()["rows"][0][0], Value::Null);
    }

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(
            sidecar_path(Path::new("out/rel.csv")),
            PathBuf::from("out/rel.csv.meta.json")
        );
    }
}
