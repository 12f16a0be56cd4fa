use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingMode {
    /// `J_ij = W(x_i, x_j)`.
    #[default]
    Weighted,
    /// Quenched W-random graph: symmetric Bernoulli(`W(x_i, x_j)`) edges, no loops.
    SampledGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelMode {
    /// `x_i = (i + ½) / N`.
    #[default]
    Equispaced,
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub dt: f64,
    #[serde(rename = "N")]
    pub particles: usize,
    pub seed: u64,
    #[serde(default)]
    pub coupling: CouplingMode,
    #[serde(default)]
    pub labels: LabelMode,
}

impl SimConfig {
    pub fn new(horizon: f64, dt: f64, particles: usize, seed: u64) -> Self {
        SimConfig {
            horizon,
            dt,
            particles,
            seed,
            coupling: CouplingMode::Weighted,
            labels: LabelMode::Equispaced,
        }
    }

    pub fn with_coupling(mut self, coupling: CouplingMode) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_labels(mut self, labels: LabelMode) -> Self {
        self.labels = labels;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_particles(mut self, particles: usize) -> Self {
        self.particles = particles;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_time_grid(self.horizon, self.dt)?;
        if self.particles == 0 {
            return Err(Error::config("N must be at least 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// Stable FNV-1a hash of the configuration's text form.
    pub fn fingerprint(&self) -> u64 {
        let text = format!(
            "{:?}|{:?}|{}|{}|{:?}|{:?}",
            self.horizon, self.dt, self.particles, self.seed, self.coupling, self.labels
        );
        text.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
        })
    }
}

/// `dt > 0`, `T ≥ dt`, and `T/dt` an integer up to rounding.
pub fn validate_time_grid(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::config(format!("dt must be positive, got {dt}")));
    }
    if !(horizon >= dt) || !horizon.is_finite() {
        return Err(Error::config(format!(
            "T = {horizon} must be at least dt = {dt}"
        )));
    }
    let ratio = horizon / dt;
    if (ratio - ratio.round()).abs() > 1e-6 * ratio.max(1.0) {
        return Err(Error::config(format!(
            "T/dt = {ratio} is not an integer number of steps"
        )));
    }
    Ok(ratio.round() as usize)
}
