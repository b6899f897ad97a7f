//! Numeric tables written as CSV (`{:.16e}` floats, exact on re-parse) or
//! as JSON `{"columns": [...], "rows": [[...]]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Integers print without an exponent; everything else with 17
/// significant digits.
fn cell(column: &str, x: f64) -> String {
    if column == "k" {
        format!("{}", x as u64)
    } else {
        format!("{x:.16e}")
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(path),
            Format::Json => {
                let text = serde_json::to_string_pretty(self).map_err(|e| io(path, e))?;
                std::fs::write(path, text + "\n").map_err(|e| io(path, e))
            }
        }
    }

    fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| io(path, e))?;
        w.write_record(&self.columns).map_err(|e| io(path, e))?;
        for row in &self.rows {
            let cells = row.iter().zip(&self.columns).map(|(x, c)| cell(c, *x));
            w.write_record(cells).map_err(|e| io(path, e))?;
        }
        w.flush().map_err(|e| io(path, e))
    }

    pub fn read(path: &Path, format: Format) -> Result<Self, CliError> {
        match format {
            Format::Csv => {
                let mut r = csv::Reader::from_path(path).map_err(|e| io(path, e))?;
                let columns = r
                    .headers()
                    .map_err(|e| io(path, e))?
                    .iter()
                    .map(String::from)
                    .collect();
                let mut rows = Vec::new();
                for rec in r.records() {
                    let rec = rec.map_err(|e| io(path, e))?;
                    let row = rec
                        .iter()
                        .map(|s| s.parse::<f64>().map_err(|e| io(path, e)))
                        .collect::<Result<Vec<_>, _>>()?;
                    rows.push(row);
                }
                Ok(Self { columns, rows })
            }
            Format::Json => {
                let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
                serde_json::from_str(&text).map_err(|e| io(path, e))
            }
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}
