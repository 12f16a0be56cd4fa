use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Distribution, InitialDatum, SimConfig};
use crate::error::{Error, Result};
use crate::graphon::LabelPartition;
use crate::pde::SpatialGrid;

/// Spatial grid keys as they appear in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "M")]
    pub cells: usize,
    pub dt_pde: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            half_width: 8.0,
            cells: 400,
            dt_pde: 1e-3,
        }
    }
}

impl GridSpec {
    pub fn grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.half_width, self.cells)
    }
}

fn default_summary_every() -> usize {
    10
}

/// Configuration of the single-run subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kernel: String,
    pub coefficients: String,
    pub init: InitialDatum,
    pub sim: SimConfig,
    #[serde(default)]
    pub grid: GridSpec,
    /// Particles per block for `reduce`; defaults to `N`.
    #[serde(default)]
    pub particles_per_block: Option<usize>,
    #[serde(default = "default_summary_every")]
    pub summary_every: usize,
    /// Times at which full states are written.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read(path)?)
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExperimentId {
    #[serde(rename = "E1-meanfield-equivalence")]
    MeanfieldEquivalence,
    #[serde(rename = "E2-condition-H")]
    ConditionH,
    #[serde(rename = "E3-relabeling")]
    Relabeling,
    #[serde(rename = "E4-cutnorm-continuity")]
    CutnormContinuity,
    #[serde(rename = "E5-initial-mixing")]
    InitialMixing,
    #[serde(rename = "E6-reduction-consistency")]
    ReductionConsistency,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::MeanfieldEquivalence,
        ExperimentId::ConditionH,
        ExperimentId::Relabeling,
        ExperimentId::CutnormContinuity,
        ExperimentId::InitialMixing,
        ExperimentId::ReductionConsistency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::MeanfieldEquivalence => "E1-meanfield-equivalence",
            ExperimentId::ConditionH => "E2-condition-H",
            ExperimentId::Relabeling => "E3-relabeling",
            ExperimentId::CutnormContinuity => "E4-cutnorm-continuity",
            ExperimentId::InitialMixing => "E5-initial-mixing",
            ExperimentId::ReductionConsistency => "E6-reduction-consistency",
        }
    }

    pub fn short(self) -> &'static str {
        &self.name()[..2]
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    /// Accepts the full id or its `E<n>` prefix, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        ExperimentId::ALL
            .into_iter()
            .find(|id| {
                id.name().to_ascii_lowercase() == lower || id.short().to_ascii_lowercase() == lower
            })
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown experiment '{s}' (available: {})",
                    ExperimentId::ALL.map(|i| i.name()).join(", ")
                ))
            })
    }
}

/// Everything a scripted experiment needs. Fields an experiment does not
/// use are ignored by it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    /// Kernels under study (registry names or specifications).
    pub kernels: Vec<String>,
    /// Kernel of the control run, where the experiment has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<String>,
    pub coefficients: String,
    pub init: InitialDatum,
    /// Initial datum of the control (E2) or pooled (E5) run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternate_init: Option<InitialDatum>,
    pub sim: SimConfig,
    #[serde(default)]
    pub grid: GridSpec,
    /// Independent seeds per configuration.
    pub replicas: usize,
    /// Particles per block of the reduced system (E6).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particles_per_block: Option<usize>,
    /// Reporting times.
    pub times: Vec<f64>,
    /// Kernel offsets (E4).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub epsilons: Vec<f64>,
    /// Block permutation (E3).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub permutation: Vec<usize>,
    /// Split position used by the refinement check (E2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_ratio: Option<f64>,
    /// Tagged label pairs (E2), each pair inside one initial-law class.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub label_pairs: Vec<[f64; 2]>,
    /// Control label pair (E2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_pair: Option<[f64; 2]>,
    /// Main distance tolerance.
    pub tolerance: f64,
    /// Tolerance on deterministic solver agreement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pde_tolerance: Option<f64>,
    /// Number of standard errors a separation must exceed.
    #[serde(default = "default_sigmas")]
    pub sigmas: f64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_sigmas() -> f64 {
    3.0
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn gaussian(mean: f64, sd: f64) -> Distribution {
    Distribution::Gaussian { mean, sd }
}

fn point(at: f64) -> Distribution {
    Distribution::PointMass { at }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read(path)?)
    }

    /// The built-in scenario for `id` at full scale.
    pub fn scripted(id: ExperimentId) -> Self {
        let sim = SimConfig::new(1.0, 1e-3, 2000, 20_240_601);
        let iid = InitialDatum::iid(gaussian(0.0, 1.0)).expect("valid datum");
        let base = ExperimentSpec {
            id,
            kernels: Vec::new(),
            control: None,
            coefficients: "kuramoto".into(),
            init: iid.clone(),
            alternate_init: None,
            sim,
            grid: GridSpec::default(),
            replicas: 1,
            particles_per_block: None,
            times: vec![0.25, 0.5, 1.0],
            epsilons: Vec::new(),
            permutation: Vec::new(),
            split_ratio: None,
            label_pairs: Vec::new(),
            control_pair: None,
            tolerance: 0.05,
            pde_tolerance: None,
            sigmas: 3.0,
            out: PathBuf::from("out").join(id.short()),
        };
        match id {
            ExperimentId::MeanfieldEquivalence => ExperimentSpec {
                kernels: vec![
                    "fig1-constant".into(),
                    "fig1-disconnected".into(),
                    "fig1-cayley".into(),
                ],
                pde_tolerance: Some(1e-10),
                ..base
            },
            ExperimentId::ConditionH => {
                let classes = LabelPartition::with_classes(vec![0.0, 0.5, 1.0], vec![0, 1])
                    .expect("valid partition");
                ExperimentSpec {
                    kernels: vec!["h-balanced4".into(), "fig2-step3".into()],
                    control: Some("h-violating2".into()),
                    init: InitialDatum::new(classes, vec![gaussian(-0.5, 0.8), gaussian(1.0, 0.6)])
                        .expect("valid datum"),
                    alternate_init: Some(iid),
                    replicas: 200,
                    split_ratio: Some(0.5),
                    label_pairs: vec![[0.125, 0.375], [0.625, 0.875]],
                    control_pair: Some([0.25, 0.75]),
                    pde_tolerance: Some(1e-12),
                    ..base
                }
            }
            ExperimentId::Relabeling => {
                let w = crate::experiments::registry::fig2_step3();
                ExperimentSpec {
                    kernels: vec!["fig2-step3".into()],
                    init: InitialDatum::per_block(
                        &w,
                        vec![gaussian(-1.0, 0.5), gaussian(0.0, 1.0), gaussian(1.5, 0.7)],
                    )
                    .expect("valid datum"),
                    replicas: 16,
                    permutation: vec![2, 0, 1],
                    tolerance: 0.04,
                    ..base
                }
            }
            ExperimentId::CutnormContinuity => ExperimentSpec {
                kernels: vec!["fig2-step3".into()],
                init: InitialDatum::per_block(
                    &crate::experiments::registry::fig2_step3(),
                    vec![gaussian(-1.0, 0.5), gaussian(0.0, 1.0), gaussian(1.5, 0.7)],
                )
                .expect("valid datum"),
                replicas: 4,
                epsilons: vec![0.0, 0.02, 0.05, 0.1],
                tolerance: 0.02,
                ..base
            },
            ExperimentId::InitialMixing => {
                let halves =
                    LabelPartition::from_breakpoints(vec![0.0, 0.5, 1.0]).expect("valid partition");
                ExperimentSpec {
                    kernels: vec!["sbm2-disconnected".into()],
                    init: InitialDatum::new(halves, vec![point(0.0), point(2.0)])
                        .expect("valid datum"),
                    alternate_init: Some(
                        InitialDatum::iid(Distribution::Empirical {
                            samples: vec![0.0, 2.0],
                        })
                        .expect("valid datum"),
                    ),
                    replicas: 8,
                    times: vec![1.0],
                    ..base
                }
            }
            ExperimentId::ReductionConsistency => ExperimentSpec {
                kernels: vec!["sbm2-unequal".into()],
                init: InitialDatum::new(
                    LabelPartition::from_breakpoints(vec![0.0, 0.4, 1.0]).expect("valid partition"),
                    vec![gaussian(-1.0, 0.5), gaussian(1.0, 0.8)],
                )
                .expect("valid datum"),
                sim: SimConfig::new(1.0, 1e-3, 4000, 20_240_601),
                replicas: 8,
                particles_per_block: Some(2000),
                tolerance: 0.06,
                ..base
            },
        }
    }

    /// Same scenario at a fraction of the cost: fewer particles and replicas,
    /// a shorter horizon and a coarser grid.
    pub fn reduced_scale(&self) -> Self {
        let mut s = self.clone();
        s.sim.particles = (s.sim.particles / 20).max(20);
        s.sim.horizon = 0.1;
        s.times = vec![0.05, 0.1];
        s.replicas = s.replicas.clamp(1, 4);
        s.particles_per_block = s.particles_per_block.map(|m| (m / 20).max(10));
        s.grid.cells = 80;
        s
    }
}
