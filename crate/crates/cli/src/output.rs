use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Self::Int(x.into())
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Self::Flag(b)
    }
}

impl Cell {
    fn render(&self, out: &mut String) {
        // `{:?}` on f64 is the shortest decimal string that round-trips.
        let _ = match self {
            Self::Num(x) => write!(out, "{x:?}"),
            Self::Int(n) => write!(out, "{n}"),
            Self::Text(s) => write!(out, "{s}"),
            Self::Flag(b) => write!(out, "{b}"),
        };
    }
}

/// Columns with units, e.g. `t [time]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    version: &'static str,
    scenario: String,
    config: &'a RunConfig,
    results: &'a Value,
}

/// Writes `<out>/<scenario>.csv` and `<out>/<scenario>.summary.json`.
pub fn write_outputs(config: &RunConfig, table: &Table, results: &Value) -> Result<[PathBuf; 2], CliError> {
    let scenario = config.scenario.map(|s| s.to_string()).unwrap_or_default();
    let dir: &Path = &config.output;
    fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{scenario}.csv"));
    fs::write(&csv, table.to_csv())?;
    let summary = Summary { version: adlab::VERSION, scenario: scenario.clone(), config, results };
    let json = dir.join(format!("{scenario}.summary.json"));
    let mut text = serde_json::to_string_pretty(&summary).expect("summary is serializable");
    text.push('\n');
    fs::write(&json, text)?;
    Ok([csv, json])
}
