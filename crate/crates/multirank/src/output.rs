//! Machine-readable output: one JSON object per single query, JSON arrays or
//! CSV for multi-row commands.

use std::collections::BTreeMap;
use std::io::Write;

use multirank_core::optimize::TableRow;
use multirank_core::Probability;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
    Estimate,
}

impl Mode {
    pub fn of(p: &Probability) -> Mode {
        if p.is_exact() {
            Mode::Exact
        } else {
            Mode::Float
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub result: Map<String, Value>,
    pub mode: Mode,
}

impl OutputRecord {
    pub fn new(command: &str, mode: Mode) -> Self {
        OutputRecord {
            command: command.to_owned(),
            inputs: BTreeMap::new(),
            result: Map::new(),
            mode,
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_owned(), value.into());
        self
    }

    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.result.insert(key.to_owned(), value.into());
        self
    }

    /// Adds `value` (decimal) and, for exact probabilities, `rational`
    /// as `"p/q"` in lowest terms.
    pub fn probability(mut self, key_prefix: &str, p: &Probability) -> Self {
        self.result
            .insert(key_prefix.to_owned(), Value::from(p.to_f64()));
        if let Some(r) = p.rational_string() {
            self.result
                .insert(format!("{key_prefix}_rational"), Value::from(r));
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn write_record(
    out: &mut dyn Write,
    record: &OutputRecord,
    format: Format,
) -> crate::cli::CliResult<()> {
    match format {
        Format::Json => {
            serde_json::to_writer(&mut *out, record)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut header = vec!["command".to_owned()];
            let mut row = vec![record.command.clone()];
            for (k, v) in &record.inputs {
                header.push(k.clone());
                row.push(scalar(v));
            }
            for (k, v) in &record.result {
                header.push(k.clone());
                row.push(scalar(v));
            }
            header.push("mode".to_owned());
            row.push(scalar(&serde_json::to_value(record.mode)?));
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&header)?;
            w.write_record(&row)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Table rows with three-decimal rendering. CSV columns: `k,c_star,p_star`.
pub fn write_table(
    out: &mut dyn Write,
    rows: &[TableRow],
    format: Format,
) -> crate::cli::CliResult<()> {
    match format {
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| serde_json::json!({ "k": r.k, "c_star": r.c_star, "p_star": r.p_star }))
                .collect();
            serde_json::to_writer(&mut *out, &items)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["k", "c_star", "p_star"])?;
            for r in rows {
                w.write_record([
                    r.k.to_string(),
                    format!("{:.3}", r.c_star),
                    format!("{:.3}", r.p_star),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// `(c, value)` pairs of a limit curve. CSV columns: `c,value`.
pub fn write_curve(
    out: &mut dyn Write,
    points: &[(f64, f64)],
    format: Format,
) -> crate::cli::CliResult<()> {
    match format {
        Format::Json => {
            let items: Vec<Value> = points
                .iter()
                .map(|&(c, v)| serde_json::json!({ "c": c, "value": v }))
                .collect();
            serde_json::to_writer(&mut *out, &items)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["c", "value"])?;
            for &(c, v) in points {
                w.write_record([c.to_string(), v.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
