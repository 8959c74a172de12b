use serde::Serialize;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use super::CliError;
use crate::integrate::{DiagnosticsRecord, Snapshot};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e))
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// `t,mean,l2,hs,sup_ux,tail`, one row per record.
pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e| CliError::io(path, e);
    writeln!(w, "t,mean,l2,hs,sup_ux,tail").map_err(io)?;
    for r in records {
        let row = [r.t, r.mean, r.l2, r.hs, r.sup_ux, r.tail].map(format_number).join(",");
        writeln!(w, "{row}").map_err(io)?;
    }
    finish(w, path)
}

/// `t,sup_u`: the amplitude trajectory next to the slope in the diagnostics file.
pub(crate) fn write_amplitude(path: &Path, records: &[DiagnosticsRecord]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e| CliError::io(path, e);
    writeln!(w, "t,sup_u").map_err(io)?;
    for r in records {
        writeln!(w, "{},{}", format_number(r.t), format_number(r.sup_u)).map_err(io)?;
    }
    finish(w, path)
}

pub(crate) fn snapshot_name(t: f64) -> String {
    format!("snapshot_{t}.csv")
}

/// Physical samples `x,u` and, when asked, the coefficients `n,re,im` beside them.
pub(crate) fn write_snapshot(dir: &Path, snap: &Snapshot, coefficients: bool) -> Result<(), CliError> {
    let path = dir.join(snapshot_name(snap.t));
    let mut w = create(&path)?;
    let io = |e| CliError::io(&path, e);
    writeln!(w, "x,u").map_err(io)?;
    let grid = snap.u.grid();
    for (x, u) in grid.points().zip(snap.u.to_physical()) {
        writeln!(w, "{},{}", format_number(x), format_number(u)).map_err(io)?;
    }
    finish(w, &path)?;
    if coefficients {
        let path = dir.join(format!("snapshot_{}_coefficients.csv", snap.t));
        let mut w = create(&path)?;
        let io = |e| CliError::io(&path, e);
        writeln!(w, "n,re,im").map_err(io)?;
        for n in grid.modes() {
            let c = snap.u.coefficient(n);
            writeln!(w, "{n},{},{}", format_number(c.re), format_number(c.im)).map_err(io)?;
        }
        finish(w, &path)?;
    }
    Ok(())
}

pub(crate) fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
