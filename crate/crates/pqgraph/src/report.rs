//! Per-query CSV run report.

use std::path::Path;

use crate::engine::SearchOutput;
use crate::error::{Error, Result};

/// Header of the run report.
pub const REPORT_COLUMNS: [&str; 4] = ["query_id", "iterations", "converged", "wall_ms"];

/// One row per query: id, iteration count `I`, convergence flag, and the
/// time from the start of its batch until its result was final.
pub fn write_run_report(path: &Path, out: &SearchOutput) -> Result<()> {
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(path, format!("{other:?}")),
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(REPORT_COLUMNS).map_err(csv_err)?;
    for (q, (r, t)) in out.results.iter().zip(&out.latency).enumerate() {
        w.write_record([
            q.to_string(),
            r.iterations.to_string(),
            r.converged.to_string(),
            format!("{:.3}", t.as_secs_f64() * 1e3),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
