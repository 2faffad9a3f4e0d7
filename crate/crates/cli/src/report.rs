use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::{Format, ScenarioConfig};
use crate::error::CliError;

/// Bumped whenever a command's column set changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Num(if v { 1.0 } else { 0.0 })
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Num(v as f64)
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

impl Cell {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }

    /// 17 significant digits, enough to round-trip any double.
    fn csv_field(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: String,
    pub command: String,
    pub inputs: serde_json::Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
    /// False only for a self-check with failing suites.
    pub ok: bool,
    pub provenance: Provenance,
}

impl RunReport {
    pub fn new(cfg: &ScenarioConfig, columns: &[&str]) -> Self {
        Self {
            schema: format!("flycat.{}.v{SCHEMA_VERSION}", cfg.command),
            command: cfg.command.to_string(),
            inputs: serde_json::to_value(cfg).expect("config serializes"),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            ok: true,
            provenance: Provenance {
                seed: cfg.seed,
                version: env!("CARGO_PKG_VERSION").to_owned(),
            },
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// Two-column `quantity,value` rows.
    pub fn push_quantity(&mut self, name: &str, value: impl Into<Cell>) {
        self.push(vec![name.into(), value.into()]);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Value of a `quantity,value` row.
    pub fn quantity(&self, name: &str) -> Option<&Cell> {
        self.rows
            .iter()
            .find(|r| matches!(&r[0], Cell::Text(t) if t == name))
            .map(|r| &r[1])
    }

    /// Header and data rows only, without comment lines.
    pub fn rows_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# schema: {}\n# version: {}\n# seed: {}\n# inputs: {}\n",
            self.schema, self.provenance.version, self.provenance.seed, self.inputs
        );
        for n in &self.notes {
            out.push_str(&format!("# note: {n}\n"));
        }
        if !self.ok {
            out.push_str("# status: FAILED\n");
        }
        out.push_str(&self.rows_csv());
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes to `out`, or to stdout when absent.
    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let text = self.render(format);
        match out {
            Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            }),
            None => std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                }),
        }
    }
}
