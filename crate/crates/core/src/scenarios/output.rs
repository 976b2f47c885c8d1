//! CSV series and `key=value` verdict files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::ExperimentReport;
use crate::error::Result;
use crate::observables::ObservableRecord;

/// Seventeen significant digits, so every `f64` round-trips.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_string(records: &[ObservableRecord<f64>], lp: &[f64]) -> String {
    let mut s = ObservableRecord::header(lp).join(",");
    s.push('\n');
    for r in records {
        let row: Vec<String> = r.values().into_iter().map(format_number).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn verdict_string(verdicts: &[(String, String)]) -> String {
    verdicts.iter().fold(String::new(), |mut s, (k, v)| {
        let _ = writeln!(s, "{k}={v}");
        s
    })
}

/// Write `<name>.csv`, `<name>.verdicts` and `<name>.scenario` (the echoed
/// spec), plus `<name>_oracle.csv` and `<name>_scattering.csv` when those
/// diagnostics ran.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let name = &report.spec.name;
    let mut written = Vec::new();
    let mut put = |file: String, body: String| -> Result<()> {
        let path = dir.join(file);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put(
        format!("{name}.csv"),
        csv_string(&report.outcome.records, &report.spec.observables.lp),
    )?;
    put(format!("{name}.verdicts"), verdict_string(&report.verdicts))?;
    put(format!("{name}.scenario"), report.spec.to_text())?;
    if let Some(t) = &report.oracle {
        let mut s = String::from("t,warped_t,relative_l2_difference\n");
        for r in &t.rows {
            let _ = writeln!(
                s,
                "{},{},{}",
                format_number(r.time),
                format_number(r.warped_time),
                format_number(r.difference)
            );
        }
        put(format!("{name}_oracle.csv"), s)?;
    }
    if let Some(sc) = &report.scattering {
        let mut s = String::from("t_from,t_to,sigma_difference\n");
        for (k, d) in sc.consecutive.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{}",
                format_number(sc.times[k]),
                format_number(sc.times[k + 1]),
                format_number(*d)
            );
        }
        put(format!("{name}_scattering.csv"), s)?;
    }
    Ok(written)
}

/// Verdict file for a run that stopped with an error.
pub fn write_failure(name: &str, dir: &Path, error: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{name}.verdicts"));
    let body = verdict_string(&[
        ("name".into(), name.into()),
        ("status".into(), "error".into()),
        ("error".into(), error.replace('\n', " ")),
    ]);
    fs::write(&path, body)?;
    Ok(path)
}
