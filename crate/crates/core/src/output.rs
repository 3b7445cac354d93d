//! Self-describing CSV and JSON tables.
//!
//! CSV files start with `#` comment lines (tool, version, config, units,
//! grid), then a header row, then data. Reals are written with 17
//! significant digits so they round-trip. JSON output is a single object
//! with `config`, `columns` and `rows`.

use std::fmt::Write as _;
use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Real)
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

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) if v.is_finite() => json!(v),
            Cell::Real(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Column names plus rows of cells.
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

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Header metadata echoed into every output file.
#[derive(Clone, Debug, Serialize)]
pub struct Header<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: C,
    pub units: String,
    pub grid: String,
}

pub fn write_table<C: Serialize, W: Write>(
    out: &mut W,
    format: OutputFormat,
    header: &Header<C>,
    table: &Table,
) -> Result<()> {
    match format {
        OutputFormat::Csv => out.write_all(render_csv(header, table)?.as_bytes())?,
        OutputFormat::Json => {
            let doc = json!({
                "config": header,
                "columns": table.columns,
                "rows": table.rows.iter()
                    .map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn render_csv<C: Serialize>(header: &Header<C>, table: &Table) -> Result<String> {
    let mut s = String::new();
    let _ = writeln!(s, "# tool: {} {}", header.tool, header.version);
    let _ = writeln!(s, "# command: {}", header.command);
    let _ = writeln!(s, "# config: {}", serde_json::to_string(&header.config)?);
    let _ = writeln!(s, "# units: {}", header.units);
    let _ = writeln!(s, "# grid: {}", header.grid);
    let _ = writeln!(s, "{}", table.columns.join(","));
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(Cell::to_csv).collect();
        let _ = writeln!(s, "{}", line.join(","));
    }
    Ok(s)
}

/// The data rows of a CSV document, without `#` comments.
pub fn csv_data_body(doc: &str) -> String {
    doc.lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}
