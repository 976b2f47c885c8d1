//! Cartesian parameter sweeps over a scenario template.

use std::fmt::Write as _;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::output::{format_number, write_failure, write_report};
use super::{max_relative_drift, parse_scenario_with, run_scenario, ExperimentReport};
use crate::error::{NlspError, Result};

/// One swept key (`section.key`) and its values.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<String>,
}

impl SweepAxis {
    /// Parse `section.key=v1,v2,...`.
    pub fn parse(arg: &str) -> Result<Self> {
        let (key, values) = arg
            .split_once('=')
            .ok_or_else(|| NlspError::Domain(format!("expected key=v1,v2,..., got `{arg}`")))?;
        Ok(Self {
            key: key.trim().to_string(),
            values: values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect(),
        })
    }
}

#[derive(Debug)]
pub struct SweepCell {
    pub index: usize,
    pub name: String,
    pub overrides: Vec<(String, String)>,
    /// Errors, including panics, are kept per cell.
    pub result: std::result::Result<ExperimentReport, String>,
}

/// Every combination of axis values, first axis slowest. No axes, or an
/// axis without values, gives no cells.
pub fn parameter_grid(axes: &[SweepAxis]) -> Vec<Vec<(String, String)>> {
    if axes.is_empty() {
        return vec![];
    }
    axes.iter().fold(vec![vec![]], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut cell = prefix.clone();
                    cell.push((axis.key.clone(), v.clone()));
                    cell
                })
            })
            .collect()
    })
}

/// Worker count: `NLSP_THREADS` when set to a positive integer, otherwise
/// the available parallelism.
pub fn pool_size() -> usize {
    std::env::var("NLSP_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn base_name(template: &str) -> String {
    parse_scenario_with(template, &[]).map_or_else(|_| "scenario".into(), |s| s.name)
}

/// Run every cell of the grid; results come back in grid order.
pub fn sweep(template: &str, axes: &[SweepAxis], threads: usize) -> Result<Vec<SweepCell>> {
    let grid = parameter_grid(axes);
    let base = base_name(template);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| NlspError::Domain(format!("thread pool: {e}")))?;
    let cells = pool.install(|| {
        grid.into_par_iter()
            .enumerate()
            .map(|(index, overrides)| {
                let name = format!("{base}_{index:03}");
                let mut with_name = overrides.clone();
                with_name.push(("name".into(), name.clone()));
                let result = catch_unwind(AssertUnwindSafe(|| {
                    parse_scenario_with(template, &with_name).and_then(|spec| run_scenario(&spec))
                }))
                .map_err(|p| {
                    p.downcast_ref::<String>()
                        .cloned()
                        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_else(|| "panic".into())
                })
                .and_then(|r| r.map_err(|e| e.to_string()));
                SweepCell {
                    index,
                    name,
                    overrides,
                    result,
                }
            })
            .collect()
    });
    Ok(cells)
}

/// One row per cell: overrides, status, bracket, drifts and error text.
pub fn summary_csv(axes: &[SweepAxis], cells: &[SweepCell]) -> String {
    let mut s = String::from("cell");
    for a in axes {
        let _ = write!(s, ",{}", a.key);
    }
    s.push_str(",status,final_time,bracket_lo,bracket_hi,mass_drift,energy_drift,error\n");
    for c in cells {
        s.push_str(&c.name);
        for (_, v) in &c.overrides {
            let _ = write!(s, ",{v}");
        }
        match &c.result {
            Ok(r) => {
                let o = &r.outcome;
                let (lo, hi) = o
                    .bracket
                    .map_or(("none".to_string(), "none".to_string()), |(a, b)| (format_number(a), format_number(b)));
                let _ = writeln!(
                    s,
                    ",{},{},{lo},{hi},{},{},",
                    o.status.as_str(),
                    format_number(o.final_time),
                    format_number(max_relative_drift(o.records.iter().map(|q| q.mass))),
                    format_number(max_relative_drift(o.records.iter().map(|q| q.energy))),
                );
            }
            Err(e) => {
                let _ = writeln!(s, ",error,,,,,,\"{}\"", e.replace('"', "'"));
            }
        }
    }
    s
}

/// Per-cell files under `dir/<cell name>/`, then `dir/summary.csv`.
pub fn write_sweep(axes: &[SweepAxis], cells: &[SweepCell], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for c in cells {
        let sub = dir.join(&c.name);
        match &c.result {
            Ok(r) => written.extend(write_report(r, &sub)?),
            Err(e) => written.push(write_failure(&c.name, &sub, e)?),
        }
    }
    let path = dir.join("summary.csv");
    fs::write(&path, summary_csv(axes, cells))?;
    written.push(path);
    Ok(written)
}
