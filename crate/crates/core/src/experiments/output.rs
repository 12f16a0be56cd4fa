//! CSV artifacts. Floats are written in Rust's shortest round-trip form, so
//! identical values always give identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dynamics::{SummaryRow, TrajectoryEnsemble};
use crate::error::{Error, Result};
use crate::pde::DensitySeries;

/// One line of a metrics table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub experiment: String,
    pub t_or_t: f64,
    pub quantity: String,
    pub value: f64,
    pub stderr: f64,
}

impl MetricRow {
    pub fn new(
        experiment: &str,
        t: f64,
        quantity: impl Into<String>,
        value: f64,
        stderr: f64,
    ) -> Self {
        MetricRow {
            experiment: experiment.to_string(),
            t_or_t: t,
            quantity: quantity.into(),
            value,
            stderr,
        }
    }
}

fn csv_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(format!("{}: {e}", path.display())))
}

fn write_rows(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<PathBuf> {
    write_rows(
        path,
        &[
            "time", "block", "mean", "var", "q05", "q25", "q50", "q75", "q95",
        ],
        rows.iter().map(|r| {
            let mut v = vec![
                r.time.to_string(),
                r.block.to_string(),
                r.mean.to_string(),
                r.var.to_string(),
            ];
            v.extend(r.quantiles.iter().map(f64::to_string));
            v
        }),
    )
}

/// Full particle states at the grid point closest to `t`.
pub fn write_snapshot(path: &Path, e: &TrajectoryEnsemble, t: f64) -> Result<PathBuf> {
    let s = e.step_at(t);
    write_rows(
        path,
        &["label", "state"],
        e.labels()
            .iter()
            .zip(e.states_at(s))
            .map(|(x, v)| vec![x.to_string(), v.to_string()]),
    )
}

/// Density frames, optionally only those closest to `times`.
pub fn write_densities(
    path: &Path,
    series: &DensitySeries,
    times: Option<&[f64]>,
) -> Result<PathBuf> {
    let grid = series.grid;
    let frames: Vec<_> = match times {
        Some(ts) => ts.iter().map(|&t| series.at_time(t)).collect(),
        None => series.frames.iter().collect(),
    };
    let mut rows = Vec::new();
    for f in frames {
        for (b, rho) in f.blocks.iter().enumerate() {
            for (c, r) in rho.iter().enumerate() {
                rows.push(vec![
                    f.time.to_string(),
                    b.to_string(),
                    grid.center(c).to_string(),
                    r.to_string(),
                ]);
            }
        }
    }
    write_rows(path, &["time", "block", "cell_center", "density"], rows)
}

pub fn write_metrics(path: &Path, rows: &[MetricRow]) -> Result<PathBuf> {
    write_rows(
        path,
        &["experiment", "t_or_T", "quantity", "value", "stderr"],
        rows.iter().map(|r| {
            vec![
                r.experiment.clone(),
                r.t_or_t.to_string(),
                r.quantity.clone(),
                r.value.to_string(),
                r.stderr.to_string(),
            ]
        }),
    )
}

/// The `state` column of a snapshot file.
pub fn read_snapshot_states(path: &Path) -> Result<Vec<f64>> {
    let bad = |e: &dyn std::fmt::Display| Error::config(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(&e))?;
    let headers = r.headers().map_err(|e| bad(&e))?.clone();
    let state = headers
        .iter()
        .position(|h| h.trim() == "state")
        .ok_or_else(|| bad(&"no 'state' column"))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(&e))?;
        let v = rec.get(state).unwrap_or("").trim();
        out.push(
            v.parse()
                .map_err(|_| bad(&format!("bad state value '{v}'")))?,
        );
    }
    Ok(out)
}
