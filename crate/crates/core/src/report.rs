//! Text encodings shared by every report: 17-significant-digit floats,
//! flat `key=value` records and small CSV tables.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Formats with 17 significant digits, which round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // keep the sign bit out of the text so -0.0 and 0.0 serialize alike
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// An ordered list of `key=value` pairs, one per line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    entries: Vec<(String, String)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.push(key, fmt_f64(value))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rec = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", i + 1)))?;
            rec.push(k.trim(), v.trim());
        }
        Ok(rec)
    }
}

/// Minimal CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct Table {
    text: String,
    columns: usize,
}

pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.columns, "row width must match header");
        let rendered: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Num(v) => fmt_f64(v),
                Cell::Int(v) => v.to_string(),
                Cell::Bool(v) => v.to_string(),
                Cell::Text(v) => v,
            })
            .collect();
        self.text.push_str(&rendered.join(","));
        self.text.push('\n');
    }

    pub fn render(&self) -> &str {
        &self.text
    }
}
