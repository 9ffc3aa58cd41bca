//! Tables and their CSV, JSON and text encodings.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    /// An integer too large for JSON numbers; emitted as a string there.
    Big(String),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Big(s) | Cell::Text(s) => s.clone(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Big(s) | Cell::Text(s) => Value::String(s.clone()),
            Cell::Float(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

/// Shortest round-trip form, so output is stable across runs and platforms.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        v.to_string().to_lowercase()
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        i64::try_from(v).map_or_else(|_| Cell::Big(v.to_string()), Cell::Int)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::from(v as u64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&num_bigint::BigUint> for Cell {
    fn from(v: &num_bigint::BigUint) -> Self {
        num_traits::ToPrimitive::to_i64(v).map_or_else(|| Cell::Big(v.to_string()), Cell::Int)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

/// A command's result: the table, plus an optional hand-written text view.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub table: Table,
    pub text: Option<String>,
    /// Extra lines appended to the default text view only.
    pub footer: Vec<String>,
}

impl Report {
    pub fn table(table: Table) -> Self {
        Self {
            table,
            ..Self::default()
        }
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Text => {
                let mut out = self.text.clone().unwrap_or_else(|| text_table(&self.table));
                for line in &self.footer {
                    out.push_str(line);
                    out.push('\n');
                }
                out.into_bytes()
            }
            other => export_table(&self.table, other),
        }
    }
}

/// CSV with a header row and LF endings, or JSON as an array of objects
/// keyed by column name in column order. Both end with a newline.
pub fn export_table(table: &Table, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut writer = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            writer
                .write_record(&table.columns)
                .expect("writing to memory");
            for row in &table.rows {
                writer
                    .write_record(row.iter().map(Cell::render))
                    .expect("writing to memory");
            }
            writer.into_inner().expect("flushing to memory")
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let object: Map<String, Value> = table
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::to_json))
                        .collect();
                    Value::Object(object)
                })
                .collect();
            let mut bytes = serde_json::to_vec_pretty(&Value::Array(rows)).expect("serializable");
            bytes.push(b'\n');
            bytes
        }
        Format::Text => text_table(table).into_bytes(),
    }
}

/// Right-aligned columns separated by two spaces.
pub fn text_table(table: &Table) -> String {
    let rendered: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| r.iter().map(Cell::render).collect())
        .collect();
    let mut widths: Vec<usize> = table.columns.iter().map(|c| c.chars().count()).collect();
    for row in &rendered {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: &[String], out: &mut String| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&table.columns, &mut out);
    for row in &rendered {
        line(row, &mut out);
    }
    out
}
