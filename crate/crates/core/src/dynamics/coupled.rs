use crate::dynamics::coefficients::CoefficientSet;
use crate::dynamics::config::{CouplingMode, SimConfig};
use crate::dynamics::engine::{Engine, Population, TagRow};
use crate::dynamics::init::InitialDatum;
use crate::dynamics::simulate::{build_coupling, initial_states, make_labels, noise_streams};
use crate::error::{Error, Result};
use crate::graphon::Kernel;
use crate::par;
use crate::rng::{replica_seed, Domain, Stream};

/// Paths of tagged particles driven by shared noise against independent
/// background populations, one per replica.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTags {
    pub labels: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    /// `paths[tag][replica][step]`.
    pub paths: Vec<Vec<Vec<f64>>>,
}

impl CoupledTags {
    pub fn replicas(&self) -> usize {
        self.paths.first().map_or(0, Vec::len)
    }

    /// Replica samples of tag `tag` at grid index `step`.
    pub fn marginal(&self, tag: usize, step: usize) -> Vec<f64> {
        self.paths[tag].iter().map(|p| p[step]).collect()
    }
}

fn tag_row(w: &Kernel, x: f64, labels: &[f64], mode: CouplingMode, seed: u64) -> TagRow {
    let inv = 1.0 / labels.len() as f64;
    match mode {
        CouplingMode::Weighted => match w {
            Kernel::Constant(_) => TagRow::Group(0),
            Kernel::Step(s) => TagRow::Group(s.block_of(x)),
            Kernel::Analytic(a) => {
                TagRow::Dense(labels.iter().map(|&y| a.eval(x, y) * inv).collect())
            }
        },
        CouplingMode::SampledGraph => {
            // Edge uniforms are shared by all tags so equal rows give equal graphs.
            let s = Stream::new(seed, Domain::Tagged, 1);
            TagRow::Graph(
                labels
                    .iter()
                    .enumerate()
                    .filter(|&(j, &y)| s.uniform(j as u64) < w.eval_unchecked(x, y))
                    .map(|(j, _)| j as u32)
                    .collect(),
            )
        }
    }
}

fn one_replica(
    w: &Kernel,
    coeffs: &CoefficientSet,
    init: &InitialDatum,
    tags: &[f64],
    cfg: &SimConfig,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let n = cfg.particles;
    let labels = make_labels(n, cfg.labels, seed);
    let coupling = build_coupling(w, &labels, cfg.coupling, seed)?;
    let rows: Vec<TagRow> = tags
        .iter()
        .map(|&x| tag_row(w, x, &labels, cfg.coupling, seed))
        .collect();
    let engine = Engine::new(coeffs, coupling, n)?;
    let mut pop = Population::new(
        engine,
        noise_streams(seed, n),
        initial_states(seed, &labels, init),
        cfg.dt,
    )?;
    let shared = Stream::new(seed, Domain::Tagged, 0);
    let u0 = shared.uniform(u64::MAX);
    let mut theta: Vec<f64> = tags
        .iter()
        .map(|&x| init.distribution_at(x).sample(u0))
        .collect();
    let steps = cfg.steps();
    let mut paths: Vec<Vec<f64>> = theta
        .iter()
        .map(|&t| {
            let mut p = Vec::with_capacity(steps + 1);
            p.push(t);
            p
        })
        .collect();
    let (dt, sqrt_dt) = (cfg.dt, cfg.dt.sqrt());
    for _ in 0..steps {
        pop.step(|engine, cache, state, step| {
            let xi = shared.normal(step as u64);
            for (t, row) in theta.iter_mut().zip(&rows) {
                let field = engine.tag_field(cache, state, row, *t);
                *t = engine.increment(*t, field, xi, dt, sqrt_dt);
            }
        })?;
        for (p, (k, &t)) in paths.iter_mut().zip(theta.iter().enumerate()) {
            if !t.is_finite() {
                return Err(Error::Blowup {
                    step: p.len(),
                    particle: n + k,
                });
            }
            p.push(t);
        }
    }
    Ok(paths)
}

/// Tagged particles at labels `tags`, each replica with its own background
/// of `cfg.particles` particles. All tags of a replica share the initial
/// uniform and the Brownian increments.
pub fn coupled_tags(
    w: &Kernel,
    coeffs: &CoefficientSet,
    init: &InitialDatum,
    tags: &[f64],
    replicas: usize,
    cfg: &SimConfig,
) -> Result<CoupledTags> {
    cfg.validate()?;
    init.validate()?;
    if replicas == 0 {
        return Err(Error::config("at least one replica is required"));
    }
    if let Some(&x) = tags.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::domain(format!("tag label {x} outside [0, 1]")));
    }
    if cfg.coupling == CouplingMode::SampledGraph && !w.is_graphon() {
        return Err(Error::domain("sampled-graph coupling needs a graphon"));
    }
    let per_replica = par::map_indices(replicas, |r| {
        one_replica(w, coeffs, init, tags, cfg, replica_seed(cfg.seed, r as u64))
    });
    let mut paths = vec![Vec::with_capacity(replicas); tags.len()];
    for rep in per_replica {
        for (slot, p) in paths.iter_mut().zip(rep?) {
            slot.push(p);
        }
    }
    Ok(CoupledTags {
        labels: tags.to_vec(),
        dt: cfg.dt,
        steps: cfg.steps(),
        paths,
    })
}

/// Monte Carlo estimate of `E sup_t |θ^x_t − θ^x̄_t|²` under the shared-noise coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPairEstimate {
    pub mean_sup_sq: f64,
    pub stderr: f64,
    /// Per-replica `sup_t |θ^x_t − θ^x̄_t|²`.
    pub sup_sq: Vec<f64>,
    pub tags: CoupledTags,
}

pub fn coupled_pair(
    w: &Kernel,
    x: f64,
    x_bar: f64,
    coeffs: &CoefficientSet,
    init: &InitialDatum,
    replicas: usize,
    cfg: &SimConfig,
) -> Result<CoupledPairEstimate> {
    for l in [x, x_bar] {
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::domain(format!("label {l} outside [0, 1]")));
        }
    }
    if init.class_of(x) != init.class_of(x_bar) {
        return Err(Error::domain(format!(
            "labels {x} and {x_bar} lie in different initial-law classes"
        )));
    }
    let tags = coupled_tags(w, coeffs, init, &[x, x_bar], replicas, cfg)?;
    Ok(CoupledPairEstimate::from_tags(&tags, 0, 1))
}

impl CoupledPairEstimate {
    /// Estimate for tags `i` and `j` of a joint run; the returned `tags`
    /// hold just those two.
    ///
    /// # Panics
    /// If `i` or `j` is not a tag of `tags`.
    pub fn from_tags(tags: &CoupledTags, i: usize, j: usize) -> Self {
        let pair = CoupledTags {
            labels: vec![tags.labels[i], tags.labels[j]],
            dt: tags.dt,
            steps: tags.steps,
            paths: vec![tags.paths[i].clone(), tags.paths[j].clone()],
        };
        let sup_sq: Vec<f64> = pair.paths[0]
            .iter()
            .zip(&pair.paths[1])
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(p, q)| (p - q) * (p - q))
                    .fold(0.0, f64::max)
            })
            .collect();
        let (mean_sup_sq, stderr) = mean_and_stderr(&sup_sq);
        CoupledPairEstimate {
            mean_sup_sq,
            stderr,
            sup_sq,
            tags: pair,
        }
    }
}

pub(crate) fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
