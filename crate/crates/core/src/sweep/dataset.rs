//! Tabular sweep output: `#`-prefixed `key=value` metadata lines, a header row
//! of column names, then comma-separated floats with 17 significant digits.
//! The JSON mirror carries the same three parts.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::invalid(format!("unknown format '{other}' (csv|json)"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            metadata: BTreeMap::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Keep only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Dataset> {
        let idx = names
            .iter()
            .map(|n| self.column_index(n).ok_or_else(|| Error::Dataset(format!("no column '{n}'"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            metadata: self.metadata.clone(),
            columns: names.iter().map(|s| s.to_string()).collect(),
            rows: self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect(),
        })
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.rows.len() {
            return Err(Error::Dataset("column length does not match row count".into()));
        }
        self.columns.push(name.into());
        for (row, v) in self.rows.iter_mut().zip(values) {
            row.push(v);
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={}", v.replace('\n', " "))?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|x| format_float(*x)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Dataset> {
        let mut ds = Dataset::default();
        let mut header_seen = false;
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.trim_start().split_once('=') {
                    ds.metadata.insert(k.to_string(), v.to_string());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            if !header_seen {
                ds.columns = line.split(',').map(str::to_string).collect();
                header_seen = true;
                continue;
            }
            let row = line
                .split(',')
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::Dataset(format!("line {}: '{f}': {e}", lineno + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != ds.columns.len() {
                return Err(Error::Dataset(format!(
                    "line {}: {} fields for {} columns",
                    lineno + 1,
                    row.len(),
                    ds.columns.len()
                )));
            }
            ds.rows.push(row);
        }
        if !header_seen {
            return Err(Error::Dataset("missing header row".into()));
        }
        Ok(ds)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn read_json<R: std::io::Read>(input: R) -> Result<Dataset> {
        Ok(serde_json::from_reader(input)?)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}
