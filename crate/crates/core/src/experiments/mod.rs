//! Scenario configuration, the kernel registry and the six scripted experiments.

pub mod config;
pub mod output;
pub mod registry;
mod runs;

use std::fmt;
use std::path::{Path, PathBuf};

pub use config::{ExperimentId, ExperimentSpec, GridSpec, RunConfig};
pub use output::{
    read_snapshot_states, write_densities, write_metrics, write_snapshot, write_summary, MetricRow,
};
pub use registry::{
    registry_list, resolve_coefficients, resolve_kernel, resolve_step_kernel, KERNEL_NAMES,
};

use crate::error::Result;
use crate::graphon::CutNormMode;

/// One declared tolerance and whether the run met it.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(criterion: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            criterion: criterion.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }

    pub fn at_least(criterion: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            criterion: criterion.into(),
            value,
            threshold,
            passed: value >= threshold,
        }
    }

    /// A yes/no property; reported as value 1 when it holds.
    pub fn holds(criterion: impl Into<String>, ok: bool) -> Self {
        Check {
            criterion: criterion.into(),
            value: if ok { 1.0 } else { 0.0 },
            threshold: 1.0,
            passed: ok,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "ok  " } else { "FAIL" };
        write!(
            f,
            "{tag} {} (value {}, threshold {})",
            self.criterion, self.value, self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub id: ExperimentId,
    pub metrics: Vec<MetricRow>,
    pub checks: Vec<Check>,
    /// Files written, in order.
    pub files: Vec<PathBuf>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn check(&self, criterion_prefix: &str) -> Option<&Check> {
        self.checks
            .iter()
            .find(|c| c.criterion.starts_with(criterion_prefix))
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.id)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        let n = self.failures().len();
        if n == 0 {
            write!(f, "  all {} checks passed", self.checks.len())
        } else {
            write!(f, "  {n} of {} checks failed", self.checks.len())
        }
    }
}

/// Runs a scripted experiment, writing its CSV files under `spec.out`.
/// Kernel specifications that name files are resolved against `base_dir`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    base_dir: &Path,
    mode: CutNormMode,
) -> Result<ExperimentReport> {
    runs::run(spec, base_dir, mode)
}
