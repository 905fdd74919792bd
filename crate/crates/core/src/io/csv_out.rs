//! CSV emission. Floats use `{:.16e}`, 17 significant digits, which
//! round-trips every `f64` exactly.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::constitutive::PropertyReport;
use crate::diagnostics::{DiagnosticsRecord, COLUMNS, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::scenarios::{ConvergenceTable, TwinRunReport};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

fn finish(mut w: csv::Writer<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn record_fields(r: &DiagnosticsRecord) -> Vec<String> {
    r.values()
        .iter()
        .enumerate()
        .map(|(i, v)| if i == 18 { r.picard_iters.to_string() } else { fmt_f64(*v) })
        .collect()
}

/// Writes the diagnostics series with the fixed header.
pub fn write_diagnostics(records: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no diagnostics records to write".into()));
    }
    let mut w = writer(path)?;
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(record_fields(r))?;
    }
    finish(w, path)
}

/// Reads a diagnostics file, rejecting any header other than the current schema.
pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header = r.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(Error::Schema {
            expected: SCHEMA_VERSION,
            msg: format!("unexpected header '{}'", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row?;
        let mut vals = [0.0; 20];
        for (j, (slot, field)) in vals.iter_mut().zip(row.iter()).enumerate() {
            *slot = field.parse().map_err(|_| Error::Schema {
                expected: SCHEMA_VERSION,
                msg: format!("row {}: column {} holds '{field}'", i + 1, COLUMNS[j]),
            })?;
        }
        out.push(DiagnosticsRecord::from_values(vals));
    }
    Ok(out)
}

pub fn write_convergence_table(table: &ConvergenceTable, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["ladder", "n", "dt", "err_v", "err_c", "max_picard", "seconds"])?;
    for (name, rows) in [("spatial", &table.spatial), ("temporal", &table.temporal)] {
        for r in rows.iter() {
            w.write_record([
                name.to_string(),
                r.n.to_string(),
                fmt_f64(r.dt),
                fmt_f64(r.err_v),
                fmt_f64(r.err_c),
                r.max_picard.to_string(),
                format!("{:.3}", r.seconds),
            ])?;
        }
    }
    finish(w, path)
}

pub fn write_twin_report(report: &TwinRunReport, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "y_v", "y_c", "y", "diss_v", "diss_c", "phi", "envelope"])?;
    for i in 0..report.t.len() {
        let row = [
            report.t[i],
            report.y_v[i],
            report.y_c[i],
            report.y[i],
            report.diss_v[i],
            report.diss_c[i],
            report.phi[i],
            report.gronwall.envelope[i],
        ];
        w.write_record(row.iter().map(|v| fmt_f64(*v)))?;
    }
    finish(w, path)
}

pub fn write_property_report(report: &PropertyReport, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["samples", "k1", "k2", "k3", "k4", "violations"])?;
    w.write_record([
        report.samples.to_string(),
        fmt_f64(report.k1),
        fmt_f64(report.k2),
        fmt_f64(report.k3),
        fmt_f64(report.k4),
        report.violations.to_string(),
    ])?;
    finish(w, path)
}

/// Writes any serializable value as pretty JSON.
pub fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    file.write_all(text.as_bytes()).and_then(|_| file.write_all(b"\n")).map_err(|e| Error::io(path, e))
}
