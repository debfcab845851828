//! Tables as CSV or JSON. Every document starts with the library version
//! and the resolved config, so identical inputs give identical bytes.

use std::io::Write;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::config::{Echo, Format};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl Cell {
    /// CSV text: 17 significant digits for floats, empty for missing.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) => s.serialize_f64(*x),
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Missing => s.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

/// Key-value pairs kept in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary(pub Vec<(&'static str, Cell)>);

impl Summary {
    pub fn push(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.0.push((key, value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }
}

impl Serialize for Summary {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub command: &'static str,
    pub summary: Summary,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<Column>) -> Self {
        Self {
            command,
            summary: Summary::default(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct Document<'a> {
    version: &'a str,
    command: &'a str,
    config: &'a Echo,
    summary: &'a Summary,
    columns: &'a [Column],
    rows: &'a [Vec<Cell>],
}

pub fn render(table: &Table, config: &Echo, format: Format) -> String {
    let config_json = serde_json::to_string(config).expect("config serializes");
    match format {
        Format::Csv => {
            let mut out = format!(
                "# magnus {} {}\n# config {}\n",
                magnus_core::VERSION,
                table.command,
                config_json
            );
            for (k, v) in &table.summary.0 {
                out.push_str(&format!("# {k} = {}\n", v.to_csv()));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(
                table
                    .columns
                    .iter()
                    .map(|c| format!("{} [{}]", c.name, c.unit)),
            )
            .expect("in-memory write");
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::to_csv))
                    .expect("in-memory write");
            }
            let body = w.into_inner().expect("in-memory write");
            out.push_str(std::str::from_utf8(&body).expect("utf-8 cells"));
            out
        }
        Format::Json => {
            let doc = Document {
                version: magnus_core::VERSION,
                command: table.command,
                config,
                summary: &table.summary,
                columns: &table.columns,
                rows: &table.rows,
            };
            let mut s = serde_json::to_string(&doc).expect("document serializes");
            s.push('\n');
            s
        }
    }
}

/// Writes to `path`, or standard output when none is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    let io = |e: std::io::Error, p: &str| CliError::Io {
        path: p.to_string(),
        source: e,
    };
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io(e, &p.display().to_string())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| io(e, "<stdout>"))
        }
    }
}
