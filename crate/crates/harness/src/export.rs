//! CSV and JSON writers for scenario tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(HarnessError::config(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

/// Rows of numbers under unit-annotated column names, optionally preceded by a
/// text label column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub label_column: Option<String>,
    pub columns: Vec<String>,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            label_column: None,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            labels: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn labelled(mut self, label_column: &str) -> Self {
        self.label_column = Some(label_column.to_string());
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_labelled(&mut self, label: impl Into<String>, row: Vec<f64>) {
        self.labels.push(label.into());
        self.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    fn row_key(&self, i: usize) -> String {
        match &self.label_column {
            Some(l) => format!("{l} = {}", self.labels[i]),
            None => format!("{} = {}", self.columns[0], format_value(self.rows[i][0])),
        }
    }

    /// Rejects NaN and infinities, naming the first offending grid point.
    pub fn check_finite(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(HarnessError::Numeric(format!(
                    "table `{}`: non-finite {} in column `{}` at {}",
                    self.name,
                    row[j],
                    self.columns[j],
                    self.row_key(i)
                )));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        self.check_finite()?;
        let mut out = String::new();
        let header: Vec<&str> = self.label_column.iter().chain(&self.columns).map(String::as_str).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            if self.label_column.is_some() {
                out.push_str(&self.labels[i]);
                out.push(',');
            }
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{}", format_value(*v)).expect("writing to a String");
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<Value> {
        self.check_finite()?;
        let mut data = Map::new();
        if let Some(l) = &self.label_column {
            data.insert(l.clone(), json!(self.labels));
        }
        for (j, c) in self.columns.iter().enumerate() {
            data.insert(c.clone(), json!(self.rows.iter().map(|r| r[j]).collect::<Vec<_>>()));
        }
        let columns: Vec<&String> = self.label_column.iter().chain(&self.columns).collect();
        Ok(json!({ "columns": columns, "data": data }))
    }
}

/// Nine significant digits in scientific notation; negative zero prints as zero.
pub fn format_value(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// Writes every table to `dir` and returns the file names, in table order.
/// Nothing is written unless every table is finite.
pub fn export(tables: &[Table], format: Format, dir: &Path) -> Result<Vec<String>> {
    let rendered: Vec<(String, String)> = match format {
        Format::Csv => tables
            .iter()
            .map(|t| Ok((format!("{}.csv", t.name), t.to_csv()?)))
            .collect::<Result<_>>()?,
        Format::Json => tables
            .iter()
            .map(|t| {
                let text = serde_json::to_string_pretty(&t.to_json()?)
                    .map_err(|e| HarnessError::Numeric(format!("cannot encode table `{}`: {e}", t.name)))?;
                Ok((format!("{}.json", t.name), text + "\n"))
            })
            .collect::<Result<_>>()?,
    };
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut names = Vec::with_capacity(rendered.len());
    for (name, text) in rendered {
        write_file(&dir.join(&name), &text)?;
        names.push(name);
    }
    Ok(names)
}
