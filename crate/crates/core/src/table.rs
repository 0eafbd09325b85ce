//! Numeric data tables with unit-tagged CSV serialization.
//!
//! Format: the first row carries headers `name[unit]`, subsequent rows hold
//! '.'-decimal numerics, `#` starts a line comment. A column named
//! `<base>_err[unit]` is attached as the error column of `<base>`. Values
//! round-trip losslessly at 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

/// Table I/O failures with row/column diagnostics.
#[derive(Debug, Error)]
pub enum TableError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("header `{header}` is missing its `[unit]` tag")]
    MissingUnit { header: String },

    #[error("duplicate column `{name}`")]
    DuplicateColumn { name: String },

    #[error("error column `{name}` has no matching value column")]
    OrphanErrorColumn { name: String },

    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("row {row}, column `{column}`: unparseable numeric `{value}`")]
    BadNumber {
        row: usize,
        column: String,
        value: String,
    },

    #[error("table has no columns")]
    Empty,

    #[error("columns have unequal lengths")]
    Unequal,
}

/// One named, unit-tagged numeric column with an optional error column.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub values: Vec<f64>,
    pub errors: Option<Vec<f64>>,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
            values,
            errors: None,
        }
    }

    pub fn with_errors(mut self, errors: Vec<f64>) -> Self {
        self.errors = Some(errors);
        self
    }
}

/// A rectangular table of unit-tagged numeric columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataTable {
    pub columns: Vec<Column>,
    /// Comment lines (without the leading '#') emitted before the header.
    pub comments: Vec<String>,
}

impl DataTable {
    pub fn new(columns: Vec<Column>) -> Result<Self, TableError> {
        if columns.is_empty() {
            return Err(TableError::Empty);
        }
        let len = columns[0].values.len();
        for c in &columns {
            if c.values.len() != len || c.errors.as_ref().is_some_and(|e| e.len() != len) {
                return Err(TableError::Unequal);
            }
        }
        Ok(DataTable {
            columns,
            comments: Vec::new(),
        })
    }

    pub fn with_comments(mut self, comments: Vec<String>) -> Self {
        self.comments = comments;
        self
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Serialize to the CSV format. Deterministic: fixed column order and
    /// 17-significant-digit scientific notation.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let mut headers = Vec::new();
        for c in &self.columns {
            headers.push(format!("{}[{}]", c.name, c.unit));
            if c.errors.is_some() {
                headers.push(format!("{}_err[{}]", c.name, c.unit));
            }
        }
        let _ = writeln!(out, "{}", headers.join(","));
        for row in 0..self.n_rows() {
            let mut fields = Vec::new();
            for c in &self.columns {
                fields.push(format_field(c.values[row]));
                if let Some(err) = &c.errors {
                    fields.push(format_field(err[row]));
                }
            }
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    /// Parse the CSV format produced by [`DataTable::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self, TableError> {
        let mut headers: Option<Vec<(String, String)>> = None;
        let mut raw_columns: Vec<Vec<f64>> = Vec::new();
        let mut comments = Vec::new();
        let mut data_row = 0usize;
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                comments.push(comment.trim().to_string());
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            match &headers {
                None => {
                    let mut parsed = Vec::new();
                    for f in &fields {
                        let (name, rest) = f.split_once('[').ok_or_else(|| {
                            TableError::MissingUnit {
                                header: f.to_string(),
                            }
                        })?;
                        let unit = rest.strip_suffix(']').ok_or_else(|| TableError::MissingUnit {
                            header: f.to_string(),
                        })?;
                        if parsed.iter().any(|(n, _): &(String, String)| n == name) {
                            return Err(TableError::DuplicateColumn {
                                name: name.to_string(),
                            });
                        }
                        parsed.push((name.to_string(), unit.to_string()));
                    }
                    raw_columns = vec![Vec::new(); parsed.len()];
                    headers = Some(parsed);
                }
                Some(parsed) => {
                    data_row += 1;
                    if fields.len() != parsed.len() {
                        return Err(TableError::RaggedRow {
                            row: data_row,
                            found: fields.len(),
                            expected: parsed.len(),
                        });
                    }
                    for (i, f) in fields.iter().enumerate() {
                        let v: f64 = f.parse().map_err(|_| TableError::BadNumber {
                            row: data_row,
                            column: parsed[i].0.clone(),
                            value: f.to_string(),
                        })?;
                        raw_columns[i].push(v);
                    }
                }
            }
        }
        let headers = headers.ok_or(TableError::Empty)?;

        // attach `<base>_err` columns to their value columns
        let mut columns: Vec<Column> = Vec::new();
        for ((name, unit), values) in headers.iter().zip(raw_columns.iter()) {
            if name.ends_with("_err") {
                continue;
            }
            columns.push(Column::new(name.clone(), unit.clone(), values.clone()));
        }
        for ((name, _unit), values) in headers.iter().zip(raw_columns.iter()) {
            if let Some(base) = name.strip_suffix("_err") {
                let target = columns
                    .iter_mut()
                    .find(|c| c.name == base)
                    .ok_or_else(|| TableError::OrphanErrorColumn { name: name.clone() })?;
                target.errors = Some(values.clone());
            }
        }
        let mut table = DataTable::new(columns)?;
        table.comments = comments;
        Ok(table)
    }
}

/// 17-significant-digit field formatting: round-trips any f64.
fn format_field(v: f64) -> String {
    format!("{v:.16e}")
}

/// Read a table from a CSV file.
pub fn read_table(path: impl AsRef<Path>) -> Result<DataTable, TableError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| TableError::Io {
        path: path.display().to_string(),
        source,
    })?;
    DataTable::from_csv(&text)
}

/// Write a table to a CSV file atomically (temp file + rename).
pub fn write_table(path: impl AsRef<Path>, table: &DataTable) -> Result<(), TableError> {
    let path = path.as_ref();
    let io_err = |source| TableError::Io {
        path: path.display().to_string(),
        source,
    };
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, table.to_csv()).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}
