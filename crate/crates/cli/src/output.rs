use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One JSON object per line.
    Jsonl,
    Csv,
    Text,
}

/// A record that can also render itself as one human-readable line.
pub trait Line: Serialize {
    fn text(&self) -> String;
}

pub struct Sink {
    format: Format,
    out: io::StdoutLock<'static>,
    csv: Option<csv::Writer<io::StdoutLock<'static>>>,
}

impl Sink {
    pub fn new(format: Format) -> Self {
        let csv = (format == Format::Csv).then(|| csv::Writer::from_writer(io::stdout().lock()));
        Sink { format, out: io::stdout().lock(), csv }
    }

    pub fn emit<R: Line>(&mut self, record: &R) -> io::Result<()> {
        match self.format {
            Format::Jsonl => {
                serde_json::to_writer(&mut self.out, record)?;
                writeln!(self.out)?;
                self.out.flush()
            }
            Format::Csv => {
                let w = self.csv.as_mut().expect("csv writer");
                w.serialize(record).map_err(io::Error::other)?;
                w.flush()
            }
            Format::Text => {
                writeln!(self.out, "{}", record.text())?;
                self.out.flush()
            }
        }
    }
}

#[derive(Serialize)]
pub struct CountRecord {
    pub set: String,
    pub n: usize,
    pub q: u64,
    pub m: u64,
    pub zeta: Option<String>,
    /// `closed_form`, `series`, `oracle`, or `verdict` for the agreement line of `--method all`.
    pub method: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl Line for CountRecord {
    fn text(&self) -> String {
        let zeta = self.zeta.as_deref().map(|z| format!(" zeta={z}")).unwrap_or_default();
        let wall = self.wall_ms.map(|w| format!(" ({w:.1} ms)")).unwrap_or_default();
        format!("{} n={} q={} m={}{zeta} {}: {}{wall}", self.set, self.n, self.q, self.m, self.method, self.value)
    }
}

#[derive(Serialize)]
pub struct PolyRecord {
    pub set: String,
    pub n: usize,
    pub m: u64,
    pub poly: String,
    pub validity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl Line for PolyRecord {
    fn text(&self) -> String {
        format!("{} n={} m={}: {}  [{}]", self.set, self.n, self.m, self.poly, self.validity)
    }
}

#[derive(Serialize)]
pub struct SeriesRecord {
    pub set: String,
    pub m: u64,
    pub degree: usize,
    pub coefficient: String,
    pub eval_q: Option<u64>,
    pub value: Option<String>,
}

impl Line for SeriesRecord {
    fn text(&self) -> String {
        match (&self.eval_q, &self.value) {
            (Some(q), Some(v)) => format!("{} m={} x^{} at q={q}: {v}", self.set, self.m, self.degree),
            _ => format!("{} m={} x^{}: {}", self.set, self.m, self.degree, self.coefficient),
        }
    }
}

#[derive(Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl Line for CheckRecord {
    fn text(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let wall = self.wall_ms.map(|w| format!(" ({w:.1} ms)")).unwrap_or_default();
        format!("{status} {}: {}{wall}", self.check, self.detail)
    }
}
