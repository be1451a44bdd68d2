//! CSV and JSON rendering. Every document starts with the generator version
//! and the resolved config, so a result file carries its own inputs.

use serde_json::{json, Value};

use crate::config::Format;
use crate::{CliError, VERSION};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl Cell {
    fn csv(&self, precision: usize) -> String {
        match self {
            Cell::Num(x) => format!("{:.*e}", precision - 1, x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(x.to_string()),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Document {
    pub command: &'static str,
    /// Resolved config as TOML.
    pub config: Option<String>,
    pub units: &'static str,
    pub precision: usize,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Document {
    pub fn new(command: &'static str, columns: &[&str]) -> Self {
        Self {
            command,
            config: None,
            units: "natural",
            precision: 17,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => Ok(self.json()),
        }
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut out = format!("# bogolon {VERSION}\n# command: {}\n# units: {}\n", self.command, self.units);
        if let Some(config) = &self.config {
            out.push_str("# config:\n");
            for line in config.lines() {
                if line.is_empty() {
                    out.push_str("#\n");
                } else {
                    out.push_str("# ");
                    out.push_str(line);
                    out.push('\n');
                }
            }
        }
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Numerical(format!("csv encoding: {e}"));
        writer.write_record(&self.columns).map_err(fail)?;
        for row in &self.rows {
            writer
                .write_record(row.iter().map(|c| c.csv(self.precision)))
                .map_err(fail)?;
        }
        let body = writer
            .into_inner()
            .map_err(|e| CliError::Numerical(format!("csv encoding: {e}")))?;
        out.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));
        Ok(out)
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "generator": format!("bogolon {VERSION}"),
            "command": self.command,
            "units": self.units,
            "config": self.config,
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("json document serializes");
        text.push('\n');
        text
    }
}

/// Recovers the config TOML from a CSV header block.
pub fn header_config(csv: &str) -> Option<String> {
    let mut lines = csv.lines().take_while(|l| l.starts_with('#'));
    lines.find(|l| *l == "# config:")?;
    let mut config = String::new();
    for line in lines {
        config.push_str(line.strip_prefix("# ").unwrap_or(&line[1..]));
        config.push('\n');
    }
    Some(config)
}
