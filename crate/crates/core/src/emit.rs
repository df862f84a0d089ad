//! CSV and JSON emission helpers. Float formatting uses Rust's shortest
//! round-trip representation, so identical values always produce
//! identical bytes.

use crate::channeling::Histogram;
use crate::error::Result;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Histogram CSV with the fixed schema (bin_lo, bin_hi, count).
pub fn write_histogram_csv(path: &Path, hist: &Histogram) -> Result<()> {
    let rows: Vec<Vec<String>> = hist
        .edges()
        .zip(&hist.counts)
        .map(|((lo, hi), &count)| vec![fmt_f64(lo), fmt_f64(hi), count.to_string()])
        .collect();
    write_csv(path, &["bin_lo", "bin_hi", "count"], &rows)
}
