use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::{CorrectnessRow, TimingRow, WidthHistogram};
use crate::interval_core::Strategy;

/// JSON schema that every emitted JSON report validates against.
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl From<Strategy> for StrategyConfig {
    fn from(s: Strategy) -> Self {
        let (eps, eta) = match s {
            Strategy::Multiplicative { eps, eta } => (Some(eps), Some(eta)),
            _ => (None, None),
        };
        StrategyConfig { name: s.name().to_string(), eps, eta }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub seed: u64,
    pub inputs: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    pub strategies: Vec<StrategyConfig>,
    pub library_version: String,
}

impl ReportConfig {
    pub fn new(seed: u64, inputs: usize, reps: Option<usize>, strategies: &[Strategy]) -> Self {
        ReportConfig {
            seed,
            inputs: inputs as u64,
            reps: reps.map(|r| r as u64),
            strategies: strategies.iter().map(|s| StrategyConfig::from(*s)).collect(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rows {
    Correctness(Vec<CorrectnessRow>),
    Width(Vec<WidthHistogram>),
    Timing(Vec<TimingRow>),
}

impl Rows {
    pub fn kind(&self) -> &'static str {
        match self {
            Rows::Correctness(_) => "correctness",
            Rows::Width(_) => "width",
            Rows::Timing(_) => "timing",
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Rows::Correctness(r) => r.is_empty(),
            Rows::Width(r) => r.is_empty(),
            Rows::Timing(r) => r.is_empty(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub config: ReportConfig,
    pub rows: Rows,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report has no rows")]
    Empty,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
}

const ZERO_BUCKET: &str = "zero";
const UNBOUNDED_BUCKET: &str = "unbounded";
const ERROR_BUCKET: &str = "error";

fn csv_bytes(report: &Report) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    // writing into memory cannot fail
    let mut put = |fields: &[&str]| w.write_record(fields).expect("in-memory write");
    match &report.rows {
        Rows::Correctness(rows) => {
            put(&["expr_id", "strategy", "inputs", "contained", "violated", "undecided", "domain_errors"]);
            for r in rows {
                put(&[
                    &r.expr_id,
                    &r.strategy,
                    &r.inputs.to_string(),
                    &r.contained.to_string(),
                    &r.violated.to_string(),
                    &r.undecided.to_string(),
                    &r.domain_errors.to_string(),
                ]);
            }
        }
        Rows::Width(rows) => {
            put(&["expr_id", "strategy", "bucket_log2_ulp", "count"]);
            for h in rows {
                if h.exact_zero > 0 {
                    put(&[&h.expr_id, &h.strategy, ZERO_BUCKET, &h.exact_zero.to_string()]);
                }
                for (b, c) in &h.buckets {
                    put(&[&h.expr_id, &h.strategy, &b.to_string(), &c.to_string()]);
                }
                if h.unbounded > 0 {
                    put(&[&h.expr_id, &h.strategy, UNBOUNDED_BUCKET, &h.unbounded.to_string()]);
                }
                if h.errors > 0 {
                    put(&[&h.expr_id, &h.strategy, ERROR_BUCKET, &h.errors.to_string()]);
                }
            }
        }
        Rows::Timing(rows) => {
            put(&["expr_id", "strategy", "inputs", "reps", "total_ms"]);
            for r in rows {
                put(&[
                    &r.expr_id,
                    &r.strategy,
                    &r.inputs.to_string(),
                    &r.reps.to_string(),
                    &format!("{:.3}", r.total_ms),
                ]);
            }
        }
    }
    w.into_inner().expect("in-memory flush")
}

fn json_value(report: &Report) -> Value {
    let rows: Vec<Value> = match &report.rows {
        Rows::Correctness(rows) => rows.iter().map(|r| serde_json::to_value(r).expect("plain struct")).collect(),
        Rows::Timing(rows) => rows.iter().map(|r| serde_json::to_value(r).expect("plain struct")).collect(),
        Rows::Width(rows) => rows
            .iter()
            .map(|h| {
                let buckets: Vec<Value> =
                    h.buckets.iter().map(|(b, c)| json!({ "bucket_log2_ulp": b, "count": c })).collect();
                json!({
                    "expr_id": h.expr_id,
                    "strategy": h.strategy,
                    "buckets": buckets,
                    "exact_zero": h.exact_zero,
                    "unbounded": h.unbounded,
                    "errors": h.errors,
                })
            })
            .collect(),
    };
    json!({ "kind": report.rows.kind(), "config": report.config, "rows": rows })
}

/// Report contents in `format`; identical reports give identical bytes.
pub fn render(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => csv_bytes(report),
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&json_value(report)).expect("serialisable");
            out.push(b'\n');
            out
        }
    }
}

/// Writes the report to `dest`, creating parent directories.
pub fn emit_report(report: &Report, format: Format, dest: &Path) -> Result<(), ReportError> {
    if report.rows.is_empty() {
        return Err(ReportError::Empty);
    }
    let io_err = |source| ReportError::Io { path: dest.to_path_buf(), source };
    if let Some(parent) = dest.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err)?;
    }
    std::fs::write(dest, render(report, format)).map_err(io_err)
}

fn read_records(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>, ReportError> {
    let malformed = |message: String| ReportError::Malformed { path: path.to_path_buf(), message };
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => ReportError::Io { path: path.to_path_buf(), source },
        other => malformed(format!("{other:?}")),
    })?;
    let found = r.headers().map_err(|e| malformed(e.to_string()))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(malformed(format!("expected header {}", header.join(","))));
    }
    r.records().map(|rec| rec.map_err(|e| malformed(e.to_string()))).collect()
}

fn field<T: std::str::FromStr>(path: &Path, rec: &csv::StringRecord, i: usize) -> Result<T, ReportError> {
    rec[i].parse().map_err(|_| ReportError::Malformed {
        path: path.to_path_buf(),
        message: format!("invalid value `{}` in column {}", &rec[i], i + 1),
    })
}

pub fn read_correctness_csv(path: &Path) -> Result<Vec<CorrectnessRow>, ReportError> {
    let header = ["expr_id", "strategy", "inputs", "contained", "violated", "undecided", "domain_errors"];
    read_records(path, &header)?
        .iter()
        .map(|rec| {
            Ok(CorrectnessRow {
                expr_id: rec[0].to_string(),
                strategy: rec[1].to_string(),
                inputs: field(path, rec, 2)?,
                contained: field(path, rec, 3)?,
                violated: field(path, rec, 4)?,
                undecided: field(path, rec, 5)?,
                domain_errors: field(path, rec, 6)?,
            })
        })
        .collect()
}

/// Rows of one (expr_id, strategy) pair are merged into one histogram, in
/// order of first appearance.
pub fn read_width_csv(path: &Path) -> Result<Vec<WidthHistogram>, ReportError> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut hists: BTreeMap<(String, String), WidthHistogram> = BTreeMap::new();
    for rec in read_records(path, &["expr_id", "strategy", "bucket_log2_ulp", "count"])? {
        let key = (rec[0].to_string(), rec[1].to_string());
        let h = hists.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            WidthHistogram { expr_id: key.0.clone(), strategy: key.1.clone(), ..Default::default() }
        });
        let count: u64 = field(path, &rec, 3)?;
        match &rec[2] {
            ZERO_BUCKET => h.exact_zero += count,
            UNBOUNDED_BUCKET => h.unbounded += count,
            ERROR_BUCKET => h.errors += count,
            _ => *h.buckets.entry(field(path, &rec, 2)?).or_insert(0) += count,
        }
    }
    Ok(order.into_iter().map(|k| hists.remove(&k).expect("inserted")).collect())
}

pub fn read_timing_csv(path: &Path) -> Result<Vec<TimingRow>, ReportError> {
    read_records(path, &["expr_id", "strategy", "inputs", "reps", "total_ms"])?
        .iter()
        .map(|rec| {
            Ok(TimingRow {
                expr_id: rec[0].to_string(),
                strategy: rec[1].to_string(),
                inputs: field(path, rec, 2)?,
                reps: field(path, rec, 3)?,
                total_ms: field(path, rec, 4)?,
            })
        })
        .collect()
}
