//! Tables and their three renderings.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Human => "txt",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    /// Not computed at this row, e.g. an expansion outside its wing.
    Blank,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Blank, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Shortest round-trip decimal; infinities as `+inf` / `-inf`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "+inf" } else { "-inf" }.into()
    } else {
        ryu::Buffer::new().format_finite(v).to_owned()
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Text(s) => s.clone(),
            Cell::Blank => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => Value::from(*v),
            Cell::Num(v) => Value::String(format_number(*v)),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Blank => Value::Null,
        }
    }
}

/// A rectangular result: one header, any number of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// A one-row table from key/value pairs.
    pub fn record(pairs: Vec<(&str, Cell)>) -> Self {
        let (columns, row): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let mut t = Table::new(columns);
        t.push(row);
        t
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
            Format::Human => self.human(),
        }
    }

    pub fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::text).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// A flat object for a single row, an array of flat objects otherwise.
    pub fn json(&self) -> String {
        let objects: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(map)
            })
            .collect();
        let doc = match <[Value; 1]>::try_from(objects) {
            Ok([single]) => single,
            Err(many) => Value::Array(many),
        };
        let mut s = doc.to_string();
        s.push('\n');
        s
    }

    fn human(&self) -> String {
        let mut out = String::new();
        if self.rows.len() == 1 {
            let width = self.columns.iter().map(String::len).max().unwrap_or(0);
            for (name, cell) in self.columns.iter().zip(&self.rows[0]) {
                let _ = writeln!(out, "{name:<width$}  {}", cell.text());
            }
            return out;
        }
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain([self.columns[j].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: &[String]| {
            let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            padded.join("  ").trim_end().to_owned()
        };
        let _ = writeln!(out, "{}", line(&self.columns));
        for r in &cells {
            let _ = writeln!(out, "{}", line(r));
        }
        out
    }
}
