use crate::dynamics::coefficients::CoefficientSet;
use crate::dynamics::config::{validate_time_grid, CouplingMode, LabelMode, SimConfig};
use crate::dynamics::engine::{Coupling, Engine, Population};
use crate::dynamics::ensemble::{Provenance, TrajectoryEnsemble};
use crate::dynamics::init::InitialDatum;
use crate::error::{Error, Result};
use crate::graphon::{Kernel, StepKernel};
use crate::par;
use crate::rng::{Domain, Stream};

pub(crate) fn make_labels(n: usize, mode: LabelMode, seed: u64) -> Vec<f64> {
    match mode {
        LabelMode::Equispaced => (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect(),
        LabelMode::UniformRandom => {
            let s = Stream::new(seed, Domain::Label, 0);
            (0..n).map(|i| s.uniform(i as u64)).collect()
        }
    }
}

/// Output groups: blocks for a step kernel, initial-law classes otherwise.
pub(crate) fn make_groups(w: &Kernel, init: &InitialDatum, labels: &[f64]) -> (Vec<usize>, usize) {
    match w {
        Kernel::Step(s) => (labels.iter().map(|&x| s.block_of(x)).collect(), s.k()),
        _ => (
            labels.iter().map(|&x| init.class_of(x)).collect(),
            init.partition.num_classes(),
        ),
    }
}

pub(crate) fn edge_present(seed: u64, i: usize, j: usize, p: f64) -> bool {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    Stream::new(seed, Domain::Graph, a as u64).uniform(b as u64) < p
}

/// Interaction weights for a population with the given labels.
pub(crate) fn build_coupling(
    w: &Kernel,
    labels: &[f64],
    mode: CouplingMode,
    seed: u64,
) -> Result<Coupling> {
    let n = labels.len();
    let inv = 1.0 / n as f64;
    match mode {
        CouplingMode::Weighted => Ok(match w {
            Kernel::Constant(p) => Coupling::Blocks {
                group: vec![0; n],
                groups: 1,
                coef: vec![p * inv],
            },
            Kernel::Step(s) => {
                let k = s.k();
                let mut coef = Vec::with_capacity(k * k);
                for a in 0..k {
                    coef.extend(s.row(a).iter().map(|v| v * inv));
                }
                Coupling::Blocks {
                    group: labels.iter().map(|&x| s.block_of(x)).collect(),
                    groups: k,
                    coef,
                }
            }
            Kernel::Analytic(a) => {
                let rows = par::map_indices(n, |i| {
                    labels
                        .iter()
                        .map(|&y| a.eval(labels[i], y) * inv)
                        .collect::<Vec<_>>()
                });
                Coupling::Dense {
                    matrix: rows.into_iter().flatten().collect(),
                }
            }
        }),
        CouplingMode::SampledGraph => {
            if !w.is_graphon() {
                return Err(Error::domain(format!(
                    "sampled-graph coupling needs a graphon with values in [0, 1]; '{}' is not one",
                    w.id()
                )));
            }
            let upper: Vec<Vec<u32>> = par::map_indices(n, |i| {
                ((i + 1)..n)
                    .filter(|&j| edge_present(seed, i, j, w.eval_unchecked(labels[i], labels[j])))
                    .map(|j| j as u32)
                    .collect()
            });
            let mut neighbors = vec![Vec::new(); n];
            for (i, row) in upper.iter().enumerate() {
                for &j in row {
                    neighbors[i].push(j);
                    neighbors[j as usize].push(i as u32);
                }
            }
            for row in &mut neighbors {
                row.sort_unstable();
            }
            Ok(Coupling::Graph {
                neighbors,
                scale: inv,
            })
        }
    }
}

pub(crate) fn noise_streams(seed: u64, n: usize) -> Vec<Stream> {
    (0..n)
        .map(|i| Stream::new(seed, Domain::Noise, i as u64))
        .collect()
}

pub(crate) fn initial_states(seed: u64, labels: &[f64], init: &InitialDatum) -> Vec<f64> {
    labels
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            init.distribution_at(x)
                .sample(Stream::new(seed, Domain::Init, i as u64).uniform(0))
        })
        .collect()
}

fn check_stride(steps: usize, stride: usize) -> Result<()> {
    if stride == 0 || !steps.is_multiple_of(stride) {
        return Err(Error::config(format!(
            "recording stride {stride} does not divide {steps} steps"
        )));
    }
    Ok(())
}

fn run(mut pop: Population<'_>, steps: usize, stride: usize) -> Result<Vec<f64>> {
    let n = pop.state().len();
    let mut states = Vec::with_capacity(n * (steps / stride + 1));
    states.extend_from_slice(pop.state());
    for s in 1..=steps {
        pop.step(|_, _, _, _| {})?;
        if s % stride == 0 {
            states.extend_from_slice(pop.state());
        }
    }
    Ok(states)
}

/// Euler–Maruyama simulation of the `N`-particle system on kernel `w`.
pub fn simulate_finite(
    w: &Kernel,
    coeffs: &CoefficientSet,
    init: &InitialDatum,
    cfg: &SimConfig,
) -> Result<TrajectoryEnsemble> {
    simulate_finite_recording(w, coeffs, init, cfg, 1)
}

/// [`simulate_finite`] storing states only every `record_every` steps,
/// which must divide the number of steps.
pub fn simulate_finite_recording(
    w: &Kernel,
    coeffs: &CoefficientSet,
    init: &InitialDatum,
    cfg: &SimConfig,
    record_every: usize,
) -> Result<TrajectoryEnsemble> {
    cfg.validate()?;
    check_stride(cfg.steps(), record_every)?;
    init.validate()?;
    let n = cfg.particles;
    let labels = make_labels(n, cfg.labels, cfg.seed);
    let coupling = build_coupling(w, &labels, cfg.coupling, cfg.seed)?;
    let (groups, num_groups) = make_groups(w, init, &labels);
    let engine = Engine::new(coeffs, coupling, n)?;
    let pop = Population::new(
        engine,
        noise_streams(cfg.seed, n),
        initial_states(cfg.seed, &labels, init),
        cfg.dt,
    )?;
    let states = run(pop, cfg.steps(), record_every)?;
    Ok(TrajectoryEnsemble {
        labels,
        groups,
        num_groups,
        dt: cfg.dt,
        steps: cfg.steps(),
        stride: record_every,
        states,
        seed: cfg.seed,
        provenance: Provenance {
            kernel: w.id(),
            coefficients: coeffs.name().to_string(),
            config_hash: cfg.fingerprint(),
        },
    })
}

/// Block system on a step kernel with `m` particles per block. A block-`a`
/// particle feels `Σ_b w_ab · m_b · (1/m) Σ Γ(θ, θ^{b,·})`, `m_b` the block
/// measure, so the system targets the same limit as [`simulate_finite`].
///
/// Particles are stored block-major; within block `a` the labels are
/// equispaced over the block, so with an equipartition and `N = k·m`
/// the two simulators draw from the same random streams.
pub fn simulate_reduced(
    w: &StepKernel,
    coeffs: &CoefficientSet,
    init: &InitialDatum,
    m: usize,
    horizon: f64,
    dt: f64,
    seed: u64,
) -> Result<TrajectoryEnsemble> {
    simulate_reduced_recording(w, coeffs, init, m, horizon, dt, seed, 1)
}

/// [`simulate_reduced`] storing states every `record_every` steps.
#[allow(clippy::too_many_arguments)]
pub fn simulate_reduced_recording(
    w: &StepKernel,
    coeffs: &CoefficientSet,
    init: &InitialDatum,
    m: usize,
    horizon: f64,
    dt: f64,
    seed: u64,
    record_every: usize,
) -> Result<TrajectoryEnsemble> {
    let steps = validate_time_grid(horizon, dt)?;
    check_stride(steps, record_every)?;
    if m == 0 {
        return Err(Error::config("particles per block must be at least 1"));
    }
    init.validate()?;
    let laws = init.block_distributions(w)?;
    let k = w.k();
    let n = k * m;
    let mut labels = Vec::with_capacity(n);
    let mut group = Vec::with_capacity(n);
    for a in 0..k {
        let (lo, hi) = w.block(a);
        for j in 0..m {
            labels.push(lo + (hi - lo) * (j as f64 + 0.5) / m as f64);
            group.push(a);
        }
    }
    let mut coef = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in 0..k {
            coef.push(w.value(a, b) * w.measure(b) / m as f64);
        }
    }
    let initial = (0..n)
        .map(|i| laws[i / m].sample(Stream::new(seed, Domain::Init, i as u64).uniform(0)))
        .collect();
    let coupling = Coupling::Blocks {
        group: group.clone(),
        groups: k,
        coef,
    };
    let engine = Engine::new(coeffs, coupling, n)?;
    let pop = Population::new(engine, noise_streams(seed, n), initial, dt)?;
    let states = run(pop, steps, record_every)?;
    let hash = SimConfig::new(horizon, dt, m, seed).fingerprint() ^ (k as u64).rotate_left(32);
    Ok(TrajectoryEnsemble {
        labels,
        groups: group,
        num_groups: k,
        dt,
        steps,
        stride: record_every,
        states,
        seed,
        provenance: Provenance {
            kernel: Kernel::Step(w.clone()).id(),
            coefficients: coeffs.name().to_string(),
            config_hash: hash,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::init::Distribution;

    fn gauss() -> InitialDatum {
        InitialDatum::iid(Distribution::Gaussian { mean: 0.0, sd: 1.0 }).unwrap()
    }

    #[test]
    fn zero_dynamics_freeze_initial_draws() {
        let c = CoefficientSet::named("zero").unwrap();
        let e = simulate_finite(
            &Kernel::Constant(0.5),
            &c,
            &gauss(),
            &SimConfig::new(0.1, 0.01, 50, 3),
        )
        .unwrap();
        for s in 0..=e.steps() {
            assert_eq!(e.states_at(s), e.states_at(0));
        }
    }

    #[test]
    fn point_mass_is_a_fixed_point() {
        let c = CoefficientSet::named("kuramoto-deterministic").unwrap();
        let init = InitialDatum::iid(Distribution::PointMass { at: 0.0 }).unwrap();
        let e = simulate_finite(
            &Kernel::Constant(0.7),
            &c,
            &init,
            &SimConfig::new(0.5, 0.01, 40, 1),
        )
        .unwrap();
        assert!(e.states_at(e.steps()).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fixed_seed_is_bitwise_reproducible() {
        let c = CoefficientSet::named("kuramoto").unwrap();
        let w = Kernel::Step(
            StepKernel::new(vec![0.0, 0.4, 1.0], vec![vec![0.8, 0.2], vec![0.2, 0.5]]).unwrap(),
        );
        let cfg = SimConfig::new(0.2, 0.01, 64, 9).with_coupling(CouplingMode::SampledGraph);
        let a = simulate_finite(&w, &c, &gauss(), &cfg).unwrap();
        let b = simulate_finite(&w, &c, &gauss(), &cfg).unwrap();
        assert_eq!(a, b);
        let other = simulate_finite(&w, &c, &gauss(), &cfg.with_seed(10)).unwrap();
        assert_ne!(a.states_at(1), other.states_at(1));
    }

    #[test]
    fn recording_stride_subsamples_the_same_path() {
        let c = CoefficientSet::named("kuramoto").unwrap();
        let cfg = SimConfig::new(0.2, 0.01, 16, 4);
        let full = simulate_finite(&Kernel::Constant(0.5), &c, &gauss(), &cfg).unwrap();
        let thin =
            simulate_finite_recording(&Kernel::Constant(0.5), &c, &gauss(), &cfg, 5).unwrap();
        assert_eq!(thin.recorded_steps(), vec![0, 5, 10, 15, 20]);
        assert_eq!(thin.states_at(15), full.states_at(15));
        assert_eq!(thin.step_at(0.12), 10);
        assert!(simulate_finite_recording(&Kernel::Constant(0.5), &c, &gauss(), &cfg, 3).is_err());
    }

    #[test]
    fn sampled_graph_requires_a_graphon() {
        let c = CoefficientSet::named("kuramoto").unwrap();
        let cfg = SimConfig::new(0.1, 0.01, 10, 0).with_coupling(CouplingMode::SampledGraph);
        assert!(matches!(
            simulate_finite(&Kernel::Constant(1.5), &c, &gauss(), &cfg),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sampled_graph_is_symmetric_without_loops() {
        let labels = make_labels(30, LabelMode::Equispaced, 0);
        let Coupling::Graph { neighbors, .. } = build_coupling(
            &Kernel::Constant(0.5),
            &labels,
            CouplingMode::SampledGraph,
            4,
        )
        .unwrap() else {
            panic!("expected a graph")
        };
        for (i, row) in neighbors.iter().enumerate() {
            assert!(!row.contains(&(i as u32)));
            for &j in row {
                assert!(neighbors[j as usize].contains(&(i as u32)));
            }
        }
    }

    #[test]
    fn reduced_matches_full_on_an_equipartition() {
        let c = CoefficientSet::named("kuramoto").unwrap();
        let s = StepKernel::uniform(vec![vec![0.9, 0.3], vec![0.3, 0.6]]).unwrap();
        let full = simulate_finite(
            &Kernel::Step(s.clone()),
            &c,
            &gauss(),
            &SimConfig::new(0.1, 0.01, 40, 5),
        )
        .unwrap();
        let red = simulate_reduced(&s, &c, &gauss(), 20, 0.1, 0.01, 5).unwrap();
        for (a, b) in full.states_at(10).iter().zip(red.states_at(10)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_rejects_misaligned_init() {
        let c = CoefficientSet::named("kuramoto").unwrap();
        let s = StepKernel::uniform(vec![vec![1.0; 2]; 2]).unwrap();
        let init = InitialDatum::new(
            crate::graphon::LabelPartition::from_breakpoints(vec![0.0, 0.3, 1.0]).unwrap(),
            vec![
                Distribution::PointMass { at: 0.0 },
                Distribution::PointMass { at: 1.0 },
            ],
        )
        .unwrap();
        assert!(matches!(
            simulate_reduced(&s, &c, &init, 10, 0.1, 0.01, 0),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn blowup_is_reported() {
        use std::sync::Arc;
        let c = CoefficientSet::new(
            "explosive",
            Some(Arc::new(|x: f64| 1e300 * (1.0 + x.abs()))),
            crate::dynamics::Interaction::Zero,
            crate::dynamics::Diffusion::Constant(0.0),
            crate::dynamics::CoefficientBounds::UNIT,
        );
        let init = InitialDatum::iid(Distribution::PointMass { at: 1.0 }).unwrap();
        let err = simulate_finite(
            &Kernel::Constant(0.0),
            &c,
            &init,
            &SimConfig::new(1.0, 0.5, 3, 0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Blowup { step: 2, .. }), "{err:?}");
    }

    #[test]
    fn permuting_streams_within_blocks_keeps_block_moments() {
        let c = CoefficientSet::named("kuramoto").unwrap();
        let w = StepKernel::uniform(vec![vec![0.9, 0.3], vec![0.3, 0.6]]).unwrap();
        let (m, k, seed, dt) = (40usize, 2usize, 11u64, 0.01);
        let coef: Vec<f64> = (0..k)
            .flat_map(|a| (0..k).map(move |b| (a, b)))
            .map(|(a, b)| w.value(a, b) * w.measure(b) / m as f64)
            .collect();
        let group: Vec<usize> = (0..k * m).map(|i| i / m).collect();
        let finals = |order: &[usize]| -> Vec<(f64, f64)> {
            let engine = Engine::new(
                &c,
                Coupling::Blocks {
                    group: group.clone(),
                    groups: k,
                    coef: coef.clone(),
                },
                k * m,
            )
            .unwrap();
            let noise = order
                .iter()
                .map(|&i| Stream::new(seed, Domain::Noise, i as u64))
                .collect();
            let initial = order
                .iter()
                .map(|&i| 2.0 * Stream::new(seed, Domain::Init, i as u64).uniform(0) - 1.0)
                .collect();
            let pop = Population::new(engine, noise, initial, dt).unwrap();
            let states = run(pop, 50, 50).unwrap();
            let last = &states[k * m..];
            (0..k)
                .map(|a| {
                    let v = &last[a * m..(a + 1) * m];
                    let mean = v.iter().sum::<f64>() / m as f64;
                    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m as f64;
                    (mean, var)
                })
                .collect()
        };
        let identity: Vec<usize> = (0..k * m).collect();
        let base = finals(&identity);
        let s = Stream::new(5, Domain::Scenario, 0);
        for p in 0..50u64 {
            let mut order = identity.clone();
            for a in 0..k {
                let block = &mut order[a * m..(a + 1) * m];
                for i in (1..m).rev() {
                    let j = (s.bits(p * 1000 + (a * m + i) as u64) % (i as u64 + 1)) as usize;
                    block.swap(i, j);
                }
            }
            for (x, y) in finals(&order).iter().zip(&base) {
                assert!((x.0 - y.0).abs() < 1e-10 && (x.1 - y.1).abs() < 1e-10);
            }
        }
    }
}
