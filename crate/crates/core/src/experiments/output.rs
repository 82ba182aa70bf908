//! CSV renderings of experiment results: `.` decimals, 17 significant
//! digits, LF line endings, empty cells for missing values.

use std::io::Write;

use super::{CoverageReport, CurveTable, ExperimentTable};
use crate::error::{Error, Result};
use crate::report::fmt_float;

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn f(x: f64) -> String {
    fmt_float(x)
}

fn of(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn ob(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.into())
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    Ok(w.flush()?)
}

/// One row per replicate and cell.
pub fn write_sweep_raw_csv<W: Write>(table: &ExperimentTable, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "target", "estimator", "n", "r", "eps", "replicate", "seed", "value", "raw_value", "clamped", "std_error",
        "ci_low", "ci_high", "status", "error",
    ])
    .map_err(csv_err)?;
    for r in &table.raw {
        w.write_record([
            r.target.clone(),
            r.estimator.to_string(),
            r.n.to_string(),
            f(r.r),
            f(r.eps),
            r.replicate.to_string(),
            r.seed.to_string(),
            of(r.value),
            of(r.raw_value),
            ob(r.clamped),
            of(r.std_error),
            of(r.ci_low),
            of(r.ci_high),
            r.status.as_str().to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// One row per cell. Runtimes are left out so the file is reproducible.
pub fn write_sweep_aggregate_csv<W: Write>(table: &ExperimentTable, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "target", "estimator", "n", "r", "eps", "replicates_ok", "mean", "sd", "q05", "q95", "clamp_rate", "truth",
        "abs_error", "status",
    ])
    .map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([
            r.target.clone(),
            r.estimator.to_string(),
            r.n.to_string(),
            f(r.r),
            f(r.eps),
            r.replicates_ok.to_string(),
            of(r.mean),
            of(r.sd),
            of(r.q05),
            of(r.q95),
            of(r.clamp_rate),
            of(r.truth),
            of(r.abs_error),
            r.status.as_str().to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// Long format: one row per (family, t, measure).
pub fn write_curves_csv<W: Write>(table: &CurveTable, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["family", "t", "measure", "value", "std_error", "method", "error"])
        .map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([
            r.family.to_string(),
            f(r.t),
            r.measure.name().to_string(),
            of(r.value),
            of(r.std_error),
            r.method.clone(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// One row per coverage replicate.
pub fn write_coverage_csv<W: Write>(report: &CoverageReport, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "replicate", "seed", "value", "std_error", "ci_low", "ci_high", "covered", "z", "error",
    ])
    .map_err(csv_err)?;
    for r in &report.replicates {
        w.write_record([
            r.replicate.to_string(),
            r.seed.to_string(),
            of(r.value),
            of(r.std_error),
            of(r.ci_low),
            of(r.ci_high),
            ob(r.covered),
            of(r.z),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}
