//! Euler–Maruyama stepping shared by the particle simulators.

use crate::dynamics::coefficients::{CoefficientSet, Diffusion, Interaction};
use crate::error::{Error, Result};
use crate::par;
use crate::rng::Stream;

/// Most separable factors the fast path carries on the stack.
const MAX_FACTORS: usize = 8;

/// Interaction weights between particles, already divided by the
/// population normalization.
pub(crate) enum Coupling {
    /// Particle `i` weighs particle `j` by `coef[group[i] * groups + group[j]]`.
    Blocks {
        group: Vec<usize>,
        groups: usize,
        coef: Vec<f64>,
    },
    /// Row-major `n × n` weight matrix.
    Dense { matrix: Vec<f64> },
    /// Unit-weight edges times a common scale.
    Graph {
        neighbors: Vec<Vec<u32>>,
        scale: f64,
    },
}

/// Interaction row of a tagged particle, which feels the population
/// without acting on it.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TagRow {
    Group(usize),
    Dense(Vec<f64>),
    Graph(Vec<u32>),
}

#[derive(Clone, Copy)]
enum Row<'a> {
    Group(usize),
    Dense(&'a [f64]),
    Graph(&'a [u32]),
}

/// Per-step precomputation for separable interactions: factor images
/// `g_r(θ_j)` interleaved by particle, and per-group weighted sums.
pub(crate) struct Cache {
    g: Vec<f64>,
    h: Vec<f64>,
}

pub(crate) struct Engine<'a> {
    coeffs: &'a CoefficientSet,
    coupling: Coupling,
    n: usize,
    rank: usize,
}

impl<'a> Engine<'a> {
    pub fn new(coeffs: &'a CoefficientSet, coupling: Coupling, n: usize) -> Result<Self> {
        let rank = match coeffs.interaction() {
            Interaction::Separable(f) => f.len(),
            _ => 0,
        };
        if rank > MAX_FACTORS {
            return Err(Error::Capability(format!(
                "separable interactions support at most {MAX_FACTORS} factors, got {rank}"
            )));
        }
        Ok(Engine {
            coeffs,
            coupling,
            n,
            rank,
        })
    }

    pub fn prepare(&self, states: &[f64]) -> Cache {
        let Interaction::Separable(factors) = self.coeffs.interaction() else {
            return Cache {
                g: Vec::new(),
                h: Vec::new(),
            };
        };
        let r = self.rank;
        let mut g = vec![0.0; self.n * r];
        for (j, &theta) in states.iter().enumerate() {
            for (k, (_, gk)) in factors.iter().enumerate() {
                g[j * r + k] = gk(theta);
            }
        }
        let h = match &self.coupling {
            Coupling::Blocks {
                group,
                groups,
                coef,
            } => {
                let mut sums = vec![0.0; groups * r];
                for (j, &gj) in group.iter().enumerate() {
                    for k in 0..r {
                        sums[gj * r + k] += g[j * r + k];
                    }
                }
                let mut h = vec![0.0; groups * r];
                for a in 0..*groups {
                    for b in 0..*groups {
                        let c = coef[a * groups + b];
                        for k in 0..r {
                            h[a * r + k] += c * sums[b * r + k];
                        }
                    }
                }
                h
            }
            _ => Vec::new(),
        };
        Cache { g, h }
    }

    /// Interaction field felt by population particle `i`.
    #[inline]
    fn field(&self, cache: &Cache, states: &[f64], i: usize) -> f64 {
        let row = match &self.coupling {
            Coupling::Blocks { group, .. } => Row::Group(group[i]),
            Coupling::Dense { matrix } => Row::Dense(&matrix[i * self.n..(i + 1) * self.n]),
            Coupling::Graph { neighbors, .. } => Row::Graph(&neighbors[i]),
        };
        self.eval_row(cache, states, row, states[i])
    }

    pub fn tag_field(&self, cache: &Cache, states: &[f64], row: &TagRow, theta: f64) -> f64 {
        let row = match row {
            TagRow::Group(g) => Row::Group(*g),
            TagRow::Dense(w) => Row::Dense(w),
            TagRow::Graph(nb) => Row::Graph(nb),
        };
        self.eval_row(cache, states, row, theta)
    }

    fn scale(&self) -> f64 {
        match &self.coupling {
            Coupling::Graph { scale, .. } => *scale,
            _ => 1.0,
        }
    }

    fn eval_row(&self, cache: &Cache, states: &[f64], row: Row<'_>, theta: f64) -> f64 {
        match self.coeffs.interaction() {
            Interaction::Zero => 0.0,
            Interaction::Separable(factors) => {
                let r = self.rank;
                let mut acc = [0.0f64; MAX_FACTORS];
                match row {
                    Row::Group(a) => acc[..r].copy_from_slice(&cache.h[a * r..(a + 1) * r]),
                    Row::Dense(w) => {
                        for (j, &wij) in w.iter().enumerate() {
                            if wij != 0.0 {
                                for k in 0..r {
                                    acc[k] += wij * cache.g[j * r + k];
                                }
                            }
                        }
                    }
                    Row::Graph(nb) => {
                        for &j in nb {
                            for k in 0..r {
                                acc[k] += cache.g[j as usize * r + k];
                            }
                        }
                        let s = self.scale();
                        for a in &mut acc[..r] {
                            *a *= s;
                        }
                    }
                }
                factors
                    .iter()
                    .zip(&acc[..r])
                    .map(|((f, _), a)| f(theta) * a)
                    .sum()
            }
            Interaction::General(gamma) => match row {
                Row::Group(a) => {
                    let Coupling::Blocks {
                        group,
                        groups,
                        coef,
                    } = &self.coupling
                    else {
                        unreachable!("group rows only arise from block couplings")
                    };
                    let coef = &coef[a * groups..(a + 1) * groups];
                    states
                        .iter()
                        .zip(group)
                        .map(|(&tj, &gj)| coef[gj] * gamma(theta, tj))
                        .sum()
                }
                Row::Dense(w) => w
                    .iter()
                    .zip(states)
                    .filter(|(&wij, _)| wij != 0.0)
                    .map(|(&wij, &tj)| wij * gamma(theta, tj))
                    .sum(),
                Row::Graph(nb) => {
                    self.scale()
                        * nb.iter()
                            .map(|&j| gamma(theta, states[j as usize]))
                            .sum::<f64>()
                }
            },
        }
    }

    fn noiseless(&self) -> bool {
        matches!(self.coeffs.diffusion_kind(), Diffusion::Constant(s) if *s == 0.0)
    }

    /// Euler–Maruyama increment for state `theta` under field `field`.
    #[inline]
    pub fn increment(&self, theta: f64, field: f64, xi: f64, dt: f64, sqrt_dt: f64) -> f64 {
        let mut out = theta + (self.coeffs.drift(theta) + field) * dt;
        if !self.noiseless() {
            out += self.coeffs.diffusion(theta) * sqrt_dt * xi;
        }
        out
    }
}

/// A population advancing in lockstep, with optional observers that read
/// the pre-step state (used for tagged particles).
pub(crate) struct Population<'a> {
    engine: Engine<'a>,
    noise: Vec<Stream>,
    state: Vec<f64>,
    next: Vec<f64>,
    step: usize,
    dt: f64,
}

impl<'a> Population<'a> {
    pub fn new(engine: Engine<'a>, noise: Vec<Stream>, initial: Vec<f64>, dt: f64) -> Result<Self> {
        check_finite(&initial, 0)?;
        let n = initial.len();
        Ok(Population {
            engine,
            noise,
            state: initial,
            next: vec![0.0; n],
            step: 0,
            dt,
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    /// Advances one step. `observe` sees the interaction cache and the
    /// state before the update.
    pub fn step<F>(&mut self, observe: F) -> Result<()>
    where
        F: FnOnce(&Engine<'a>, &Cache, &[f64], usize),
    {
        let cache = self.engine.prepare(&self.state);
        observe(&self.engine, &cache, &self.state, self.step);
        let (dt, sqrt_dt) = (self.dt, self.dt.sqrt());
        let step = self.step as u64;
        let engine = &self.engine;
        let state = &self.state;
        let noise = &self.noise;
        let silent = engine.noiseless();
        par::fill(&mut self.next, |i| {
            let xi = if silent { 0.0 } else { noise[i].normal(step) };
            engine.increment(state[i], engine.field(&cache, state, i), xi, dt, sqrt_dt)
        });
        self.step += 1;
        check_finite(&self.next, self.step)?;
        std::mem::swap(&mut self.state, &mut self.next);
        Ok(())
    }
}

pub(crate) fn check_finite(states: &[f64], step: usize) -> Result<()> {
    match states.iter().position(|v| !v.is_finite()) {
        Some(particle) => Err(Error::Blowup { step, particle }),
        None => Ok(()),
    }
}
