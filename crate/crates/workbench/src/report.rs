//! Experiment records and their CSV / JSONL renderings. Output is
//! byte-stable: constants are kept in sorted order and floats print with
//! Rust's shortest round-trip formatting.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ReportRecord {
    pub experiment: String,
    pub trial: u64,
    pub constants: BTreeMap<String, f64>,
    pub pass: bool,
}

impl ReportRecord {
    pub fn new(experiment: impl Into<String>, trial: u64) -> Self {
        Self { experiment: experiment.into(), trial, constants: BTreeMap::new(), pass: true }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.constants.insert(name.to_string(), value);
        self
    }

    pub fn passing(mut self, pass: bool) -> Self {
        self.pass = self.pass && pass;
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReportFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for ReportFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "csv" => ReportFormat::Csv,
            "jsonl" => ReportFormat::Jsonl,
            other => bail!("unknown report format {other:?} (csv or jsonl)"),
        })
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Jsonl => "jsonl",
        })
    }
}

pub fn render_csv(records: &[ReportRecord]) -> String {
    let mut out = String::from("experiment,trial,name,value,pass\n");
    for r in records {
        for (name, value) in &r.constants {
            out.push_str(&format!("{},{},{},{},{}\n", r.experiment, r.trial, name, value, r.pass));
        }
    }
    out
}

pub fn render_jsonl(records: &[ReportRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("serializable record"));
        out.push('\n');
    }
    out
}

pub fn render(records: &[ReportRecord], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_csv(records),
        ReportFormat::Jsonl => render_jsonl(records),
    }
}

/// Writes records to `path`; IO failures carry the path.
pub fn emit(records: &[ReportRecord], format: ReportFormat, path: &Path) -> Result<()> {
    std::fs::write(path, render(records, format))
        .with_context(|| format!("writing report {}", path.display()))
}
