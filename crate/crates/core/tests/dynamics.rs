use std::sync::Arc;

use graphon_core::dynamics::{
    coupled_pair, simulate_finite, simulate_reduced, CoefficientBounds, CoefficientSet,
    CouplingMode, Diffusion, Distribution, InitialDatum, Interaction, LabelMode, SimConfig,
    TrajectoryEnsemble,
};
use graphon_core::graphon::{Kernel, LabelPartition, StepKernel};
use graphon_core::metrics::{group_replicas, pooled_at, wasserstein2};
use graphon_core::rng::replica_seed;

fn gauss() -> InitialDatum {
    InitialDatum::iid(Distribution::Gaussian { mean: 0.0, sd: 1.0 }).unwrap()
}

fn fig2() -> StepKernel {
    let a = [5.0 / 6.0, 0.5, 1.0 / 6.0];
    StepKernel::uniform(
        a.iter()
            .map(|x| a.iter().map(|y| x * y).collect())
            .collect(),
    )
    .unwrap()
}

#[test]
fn identical_configuration_is_bitwise_reproducible() {
    let c = CoefficientSet::named("tanh-drift").unwrap();
    let kernels = [
        Kernel::Constant(0.4),
        Kernel::Step(fig2()),
        graphon_core::experiments::resolve_kernel("fig1-cayley", std::path::Path::new("."))
            .unwrap(),
    ];
    for w in &kernels {
        for cfg in [
            SimConfig::new(0.2, 0.01, 120, 7),
            SimConfig::new(0.2, 0.01, 120, 7).with_coupling(CouplingMode::SampledGraph),
            SimConfig::new(0.2, 0.01, 120, 7).with_labels(LabelMode::UniformRandom),
        ] {
            let a = simulate_finite(w, &c, &gauss(), &cfg).unwrap();
            let b = simulate_finite(w, &c, &gauss(), &cfg).unwrap();
            assert_eq!(a, b);
        }
    }
    let s = fig2();
    assert_eq!(
        simulate_reduced(&s, &c, &gauss(), 30, 0.2, 0.01, 3).unwrap(),
        simulate_reduced(&s, &c, &gauss(), 30, 0.2, 0.01, 3).unwrap()
    );
}

fn max_displacement(e: &TrajectoryEnsemble) -> f64 {
    let first = e.states_at(0);
    let last = e.states_at(e.steps());
    first
        .iter()
        .zip(last)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn deterministic_growth_is_at_most_twice_the_horizon() {
    let pushy = CoefficientSet::new(
        "pushy",
        Some(Arc::new(f64::cos)),
        Interaction::General(Arc::new(|a: f64, b: f64| (b - a).clamp(-1.0, 1.0))),
        Diffusion::Constant(0.0),
        CoefficientBounds::UNIT,
    );
    let sets = [
        CoefficientSet::named("kuramoto-deterministic").unwrap(),
        pushy,
    ];
    let kernels = [Kernel::Constant(1.0), Kernel::Step(fig2())];
    let init = InitialDatum::iid(Distribution::Uniform {
        low: -3.0,
        high: 3.0,
    })
    .unwrap();
    let horizon = 0.5;
    for c in &sets {
        for w in &kernels {
            let e = simulate_finite(w, c, &init, &SimConfig::new(horizon, 0.01, 200, 2)).unwrap();
            let d = max_displacement(&e);
            assert!(d <= 2.0 * horizon + 1e-12, "{}: {d}", c.name());
            assert!(d > 0.0);
        }
    }
}

#[test]
fn same_class_blocks_share_their_law() {
    let w = Kernel::Step(
        StepKernel::uniform(vec![
            vec![0.9, 0.1, 0.2, 0.6],
            vec![0.1, 0.9, 0.6, 0.2],
            vec![0.2, 0.6, 0.3, 0.5],
            vec![0.6, 0.2, 0.5, 0.3],
        ])
        .unwrap(),
    );
    let init = InitialDatum::new(
        LabelPartition::from_breakpoints(vec![0.0, 0.5, 1.0]).unwrap(),
        vec![
            Distribution::Gaussian {
                mean: -0.5,
                sd: 0.8,
            },
            Distribution::Gaussian { mean: 1.0, sd: 0.6 },
        ],
    )
    .unwrap();
    let c = CoefficientSet::named("kuramoto").unwrap();
    let base = SimConfig::new(1.0, 0.01, 1000, 21);
    let es: Vec<_> = (0..4)
        .map(|r| {
            simulate_finite(&w, &c, &init, &base.clone().with_seed(replica_seed(21, r))).unwrap()
        })
        .collect();
    let last = es[0].steps();
    let block = |g| group_replicas(&es, last, g).unwrap();
    let same_01 = wasserstein2(&block(0), &block(1)).unwrap();
    let same_23 = wasserstein2(&block(2), &block(3)).unwrap();
    let across = wasserstein2(&block(0), &block(2)).unwrap();
    assert!(same_01 < 0.15, "{same_01}");
    assert!(same_23 < 0.15, "{same_23}");
    assert!(across > 0.5, "{across}");
}

#[test]
fn sampled_graph_approaches_weighted_coupling() {
    let w = Kernel::Step(fig2());
    let c = CoefficientSet::named("kuramoto").unwrap();
    let init = InitialDatum::iid(Distribution::Uniform {
        low: -2.0,
        high: 2.0,
    })
    .unwrap();
    let gaps: Vec<f64> = [250usize, 1000, 4000]
        .iter()
        .map(|&n| {
            let cfg = SimConfig::new(0.5, 0.01, n, 13);
            let a = simulate_finite(&w, &c, &init, &cfg).unwrap();
            let b = simulate_finite(
                &w,
                &c,
                &init,
                &cfg.with_coupling(CouplingMode::SampledGraph),
            )
            .unwrap();
            let s = a.steps();
            wasserstein2(&pooled_at(&a, s), &pooled_at(&b, s)).unwrap()
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn coupled_pairs_vanish_when_labels_are_interchangeable() {
    let c = CoefficientSet::named("kuramoto").unwrap();
    let cfg = SimConfig::new(0.5, 0.01, 100, 4);
    let same = coupled_pair(&Kernel::Step(fig2()), 0.3, 0.3, &c, &gauss(), 8, &cfg).unwrap();
    assert_eq!(same.mean_sup_sq, 0.0);
    let constant = coupled_pair(&Kernel::Constant(0.6), 0.1, 0.9, &c, &gauss(), 8, &cfg).unwrap();
    assert_eq!(constant.mean_sup_sq, 0.0);
}

#[test]
fn coupled_pair_detects_unequal_blocks() {
    let w = Kernel::Step(StepKernel::uniform(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap());
    let c = CoefficientSet::named("kuramoto").unwrap();
    let init = InitialDatum::iid(Distribution::Uniform {
        low: -2.0,
        high: 2.0,
    })
    .unwrap();
    let est = coupled_pair(
        &w,
        0.25,
        0.75,
        &c,
        &init,
        200,
        &SimConfig::new(1.0, 0.01, 100, 8),
    )
    .unwrap();
    assert!(
        est.mean_sup_sq > 3.0 * est.stderr,
        "{} vs {}",
        est.mean_sup_sq,
        est.stderr
    );
}
