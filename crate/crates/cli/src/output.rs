//! Result tables and their CSV encoding.

use std::fs;
use std::path::{Path, PathBuf};

use gibbsium::Extended;

use crate::error::{CliError, Result};

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Ext(Extended),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Extended> for Cell {
    fn from(v: Extended) -> Self {
        Cell::Ext(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {
        $(impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i64)
            }
        })*
    };
}

int_cell!(i32, i64, u32, u64, usize);

/// Shortest round-trip text; exponent form outside `[1e-4, 1e15)`.
pub fn format_float(v: f64) -> Option<String> {
    if v.is_nan() {
        return None;
    }
    if v.is_infinite() {
        return Some(if v > 0.0 { "inf".into() } else { "-inf".into() });
    }
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        Some(format!("{v}"))
    } else {
        Some(format!("{v:e}"))
    }
}

impl Cell {
    fn render(&self) -> Option<String> {
        match self {
            Cell::Int(v) => Some(v.to_string()),
            Cell::Float(v) => format_float(*v),
            Cell::Ext(Extended::Infinite) => Some("inf".into()),
            Cell::Ext(Extended::Finite(v)) => format_float(*v),
            Cell::Bool(b) => Some(if *b { "true" } else { "false" }.into()),
            Cell::Text(s) => Some(s.clone()),
        }
    }
}

/// A named table with fixed columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// The CSV text: one `#` metadata line, a header row, then the rows.
    pub fn to_csv(&self, metadata: &str) -> std::result::Result<String, String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| e.to_string())?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut record = Vec::with_capacity(row.len());
            for (cell, col) in row.iter().zip(&self.columns) {
                let text = cell
                    .render()
                    .ok_or_else(|| format!("NaN in table {} row {i} column {col}", self.name))?;
                record.push(text);
            }
            w.write_record(&record).map_err(|e| e.to_string())?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        Ok(format!("# {metadata}\n{body}"))
    }
}

/// Write every table to `<dir>/<name>.csv`, creating `dir` if needed.
pub fn write_tables(dir: &Path, tables: &[Table], metadata: &str, experiment: &str) -> Result<Vec<PathBuf>> {
    let io = |path: &Path, source| CliError::Io {
        field: "out".into(),
        path: path.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    for t in tables {
        let text = t.to_csv(metadata).map_err(|msg| CliError::Numeric {
            experiment: experiment.to_string(),
            source: gibbsium::Error::InvalidArgument(msg),
        })?;
        let path = dir.join(format!("{}.csv", t.name));
        fs::write(&path, text).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
