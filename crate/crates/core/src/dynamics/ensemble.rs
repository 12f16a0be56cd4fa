/// Where a trajectory ensemble came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub kernel: String,
    pub coefficients: String,
    pub config_hash: u64,
}

/// Particle trajectories on a uniform time grid, stored time-major. States
/// are kept every `stride` steps (always including step 0 and the last step).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    pub(crate) labels: Vec<f64>,
    /// Block (step kernels) or initial-law class (other kernels) of each particle.
    pub(crate) groups: Vec<usize>,
    pub(crate) num_groups: usize,
    pub(crate) dt: f64,
    pub(crate) steps: usize,
    pub(crate) stride: usize,
    pub(crate) states: Vec<f64>,
    pub(crate) seed: u64,
    pub(crate) provenance: Provenance,
}

impl TrajectoryEnsemble {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn groups(&self) -> &[usize] {
        &self.groups
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Grid indices with stored states.
    pub fn recorded_steps(&self) -> Vec<usize> {
        (0..=self.steps).step_by(self.stride).collect()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    /// Times with stored states.
    pub fn times(&self) -> Vec<f64> {
        self.recorded_steps()
            .into_iter()
            .map(|s| self.time(s))
            .collect()
    }

    /// Recorded grid index closest to time `t`.
    pub fn step_at(&self, t: f64) -> usize {
        let frame = (t / (self.dt * self.stride as f64)).round().max(0.0) as usize;
        (frame * self.stride).min(self.steps)
    }

    /// All particle states at recorded grid index `step`.
    ///
    /// # Panics
    /// If `step` was not recorded.
    pub fn states_at(&self, step: usize) -> &[f64] {
        assert!(
            step.is_multiple_of(self.stride) && step <= self.steps,
            "step {step} was not recorded"
        );
        let n = self.len();
        let f = step / self.stride;
        &self.states[f * n..(f + 1) * n]
    }

    /// Recorded states of one particle.
    pub fn path(&self, particle: usize) -> Vec<f64> {
        self.recorded_steps()
            .into_iter()
            .map(|s| self.states_at(s)[particle])
            .collect()
    }

    /// States of the particles of group `g` at `step`.
    pub fn group_states(&self, step: usize, g: usize) -> Vec<f64> {
        self.states_at(step)
            .iter()
            .zip(&self.groups)
            .filter(|(_, &gi)| gi == g)
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn all_finite(&self) -> bool {
        self.states.iter().all(|v| v.is_finite())
    }
}

/// Summary statistics of one group at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub time: f64,
    pub block: usize,
    pub mean: f64,
    pub var: f64,
    pub quantiles: [f64; 5],
}

pub const SUMMARY_QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn summarize(time: f64, block: usize, values: &[f64]) -> SummaryRow {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut quantiles = [0.0; 5];
    for (q, &p) in quantiles.iter_mut().zip(&SUMMARY_QUANTILES) {
        *q = quantile_sorted(&sorted, p);
    }
    SummaryRow {
        time,
        block,
        mean,
        var,
        quantiles,
    }
}

impl TrajectoryEnsemble {
    /// Per-group summaries every `every` steps (the last step is always included).
    pub fn summary(&self, every: usize) -> Vec<SummaryRow> {
        let every = every.max(1);
        let mut steps: Vec<usize> = self
            .recorded_steps()
            .into_iter()
            .filter(|s| s % every == 0)
            .collect();
        if steps.last() != Some(&self.steps) {
            steps.push(self.steps);
        }
        let mut rows = Vec::new();
        for s in steps {
            for g in 0..self.num_groups {
                let vals = self.group_states(s, g);
                if !vals.is_empty() {
                    rows.push(summarize(self.time(s), g, &vals));
                }
            }
        }
        rows
    }
}
