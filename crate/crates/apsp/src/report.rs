//! Rendering and parsing of benchmark records.

use std::fmt::Write as _;
use std::str::FromStr;

use apsp_core::DType;
use thiserror::Error;

use crate::bench::BenchRecord;

/// CSV header, in field order.
pub const CSV_HEADER: &str = "n,tb,threads,dtype,reps,mean_s,min_s,stddev_s,gflops_mean,gflops_peak";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
    #[value(alias = "md")]
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(ReportError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown report format {0:?} (expected csv, json, or markdown)")]
    UnknownFormat(String),
    #[error("no records to report")]
    Empty,
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Records sorted by `(n, tb, threads, dtype)`.
pub fn sorted(records: &[BenchRecord]) -> Vec<BenchRecord> {
    let mut out = records.to_vec();
    out.sort_by_key(|r| (r.n, r.tb, r.threads, r.dtype.code()));
    out
}

pub fn render(records: &[BenchRecord], format: ReportFormat) -> Result<String, ReportError> {
    if records.is_empty() {
        return Err(ReportError::Empty);
    }
    let records = sorted(records);
    match format {
        ReportFormat::Csv => to_csv(&records),
        ReportFormat::Json => Ok(serde_json::to_string_pretty(&records)? + "\n"),
        ReportFormat::Markdown => Ok(to_markdown(&records)),
    }
}

fn to_csv(records: &[BenchRecord]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn to_markdown(records: &[BenchRecord]) -> String {
    let mut out = String::new();
    for dtype in [DType::F32, DType::F64] {
        let rows: Vec<&BenchRecord> = records.iter().filter(|r| r.dtype == dtype).collect();
        if rows.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "### {dtype}\n");
        out.push_str("| n | tb | threads | reps | mean (s) | min (s) | stddev (s) | GFLOPS (mean) | GFLOPS (peak) |\n");
        out.push_str("|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n");
        for r in rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {:.6} | {:.6} | {:.6} | {:.3} | {:.3} |",
                r.n, r.tb, r.threads, r.reps, r.mean_s, r.min_s, r.stddev_s, r.gflops_mean, r.gflops_peak
            );
        }
    }
    out
}

/// Parses CSV or JSON produced by [`render`]; JSON is recognised by a
/// leading `[`.
pub fn parse_records(text: &str) -> Result<Vec<BenchRecord>, ReportError> {
    if text.trim_start().starts_with('[') {
        return Ok(serde_json::from_str(text)?);
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader.deserialize().map(|r| r.map_err(ReportError::from)).collect()
}
