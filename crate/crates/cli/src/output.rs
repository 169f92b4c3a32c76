use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::ConfigEcho;
use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => Value::from(*x),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::from(*b),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let mut m = Map::new();
        m.insert("columns".into(), Value::from(self.columns.clone()));
        m.insert("rows".into(), Value::Array(rows));
        Value::Object(m)
    }
}

/// Output of one command: a flat table for CSV and a structured body for
/// JSON, both carrying the resolved configuration.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub echo: ConfigEcho,
    /// Scalar results, written as `# key=value` lines ahead of the CSV table.
    pub summary: Vec<(String, Cell)>,
    pub table: Table,
    pub body: Map<String, Value>,
    pub default_format: Format,
}

impl Report {
    pub fn new(command: &'static str, echo: ConfigEcho, default_format: Format) -> Self {
        Self {
            command,
            echo,
            summary: Vec::new(),
            table: Table::default(),
            body: Map::new(),
            default_format,
        }
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        let v = serde_json::to_value(value)
            .map_err(|e| CliError::config(format!("cannot encode {key}: {e}")))?;
        self.body.insert(key.to_string(), v);
        Ok(())
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> Result<String> {
        let mut out = format!("# command={}\n", self.command);
        let echo = serde_json::to_value(&self.echo)
            .map_err(|e| CliError::config(format!("cannot encode config: {e}")))?;
        if let Value::Object(m) = echo {
            for (k, v) in m {
                let text = match v {
                    Value::Null => "none".to_string(),
                    Value::String(s) => s,
                    Value::Number(n) => n
                        .as_f64()
                        .filter(|_| n.is_f64())
                        .map(format_float)
                        .unwrap_or_else(|| n.to_string()),
                    other => other.to_string(),
                };
                out.push_str(&format!("# {k}={text}\n"));
            }
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("# {k}={}\n", v.render()));
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::config(format!("csv: {e}"));
        w.write_record(&self.table.columns).map_err(csv_err)?;
        for row in &self.table.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::config(format!("csv: {e}")))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }

    fn render_json(&self) -> Result<String> {
        let mut top = Map::new();
        top.insert("command".into(), Value::from(self.command));
        top.insert(
            "config".into(),
            serde_json::to_value(&self.echo)
                .map_err(|e| CliError::config(format!("cannot encode config: {e}")))?,
        );
        for (k, v) in &self.summary {
            top.insert(k.clone(), v.json());
        }
        for (k, v) in &self.body {
            top.insert(k.clone(), v.clone());
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(top))
            .map_err(|e| CliError::config(format!("json: {e}")))?;
        s.push('\n');
        Ok(s)
    }
}
