mod common;

use common::{brute_force_cut_norm, seeded_step_kernel, step_kernel};
use graphon_core::graphon::{
    check_condition_h, cut_distance_step, cut_norm, cut_norm_exact, cut_norm_heuristic,
    AnalyticKernel, CayleyProfile, CutNormMode, IntervalSet, Kernel, LabelPartition,
    HEURISTIC_RESTARTS,
};
use graphon_core::rng::{Domain, Stream};
use proptest::prelude::*;

fn cayley() -> Kernel {
    Kernel::Analytic(AnalyticKernel::cayley(CayleyProfile::Cosine {
        mean: 0.4,
        amplitude: 0.3,
    }))
}

#[test]
fn evaluation_is_symmetric_on_random_pairs() {
    let s = Stream::new(3, Domain::Scenario, 0);
    let step = Kernel::Step(seeded_step_kernel(11, 5, 0.0, 1.0));
    let analytic = [cayley(), Kernel::Analytic(AnalyticKernel::scale_free(0.5))];
    for i in 0..10_000u64 {
        let (x, y) = (s.uniform(2 * i), s.uniform(2 * i + 1));
        assert_eq!(step.eval(x, y).unwrap(), step.eval(y, x).unwrap());
        assert_eq!(
            Kernel::Constant(0.3).eval(x, y).unwrap(),
            Kernel::Constant(0.3).eval(y, x).unwrap()
        );
        for a in &analytic {
            assert!((a.eval(x, y).unwrap() - a.eval(y, x).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn heuristic_matches_exact_on_random_kernels() {
    for seed in 0..100u64 {
        let k = 1 + (seed % 8) as usize;
        let w = seeded_step_kernel(seed, k, -1.0, 1.0);
        let exact = cut_norm_exact(&w).unwrap();
        let heuristic = cut_norm_heuristic(&w, HEURISTIC_RESTARTS, seed);
        assert!(heuristic <= exact, "seed {seed}: {heuristic} > {exact}");
        assert!(
            (exact - heuristic).abs() <= 1e-12 * exact.max(1.0),
            "seed {seed}"
        );
    }
}

#[test]
fn relabeled_kernel_is_at_cut_distance_zero() {
    let w = seeded_step_kernel(5, 4, 0.0, 1.0)
        .averaged_onto(vec![0.0, 0.25, 0.5, 0.75, 1.0])
        .unwrap();
    let v = w.relabel(&[3, 1, 0, 2]).unwrap();
    let d = cut_distance_step(&w, &v, CutNormMode::Exact).unwrap();
    assert_eq!(d.value, 0.0);
    assert!(d.exhaustive);
    assert!(cut_norm(&w.difference(&v).unwrap(), CutNormMode::Exact).unwrap() > 0.0);
}

#[test]
fn balanced_kernel_satisfies_condition_h() {
    let w = Kernel::Step(
        graphon_core::graphon::StepKernel::uniform(vec![
            vec![0.9, 0.1, 0.2, 0.6],
            vec![0.1, 0.9, 0.6, 0.2],
            vec![0.2, 0.6, 0.3, 0.5],
            vec![0.6, 0.2, 0.5, 0.3],
        ])
        .unwrap(),
    );
    let halves = LabelPartition::from_breakpoints(vec![0.0, 0.5, 1.0]).unwrap();
    assert!(check_condition_h(&w, &halves, 8, 1e-8).unwrap().holds);
    let quarters = LabelPartition::uniform(4).unwrap();
    assert!(check_condition_h(&w, &quarters, 8, 1e-8).unwrap().holds);
    let skew = LabelPartition::from_breakpoints(vec![0.0, 0.25, 1.0]).unwrap();
    assert!(!check_condition_h(&w, &skew, 8, 1e-8).unwrap().holds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_cut_norm_matches_subset_enumeration(w in step_kernel(4, -1.0, 1.0)) {
        let exact = cut_norm_exact(&w).unwrap();
        let brute = brute_force_cut_norm(&w);
        prop_assert!((exact - brute).abs() <= 1e-12, "{} vs {}", exact, brute);
    }

    #[test]
    fn cut_norm_is_homogeneous(w in step_kernel(6, -1.0, 1.0), e in -4i32..4, neg in any::<bool>(), c in 0.01f64..10.0) {
        let base = cut_norm_exact(&w).unwrap();
        let p = if neg { -(2f64.powi(e)) } else { 2f64.powi(e) };
        prop_assert_eq!(cut_norm_exact(&w.scaled(p)).unwrap(), p.abs() * base);
        let general = cut_norm_exact(&w.scaled(c)).unwrap();
        prop_assert!((general - c * base).abs() <= 1e-13 * (1.0 + c * base));
    }

    #[test]
    fn cut_norm_is_bounded(w in step_kernel(6, -1.0, 1.0)) {
        let c = cut_norm_exact(&w).unwrap();
        prop_assert!(w.integral().abs() <= c);
        prop_assert!(c <= w.bound() + 1e-15);
        let l1: f64 = w.weighted_masses().iter().map(|a| a.abs()).sum();
        prop_assert!(c <= l1 + 1e-15);
    }

    #[test]
    fn heuristic_never_exceeds_exact(w in step_kernel(10, -1.0, 1.0), seed in any::<u64>()) {
        prop_assert!(cut_norm_heuristic(&w, HEURISTIC_RESTARTS, seed) <= cut_norm_exact(&w).unwrap());
    }

    #[test]
    fn degrees_respect_bounds(w in step_kernel(5, 0.0, 1.0), x in 0.0f64..1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let k = Kernel::Step(w);
        prop_assert!(k.is_graphon());
        let d = k.degree(x).unwrap();
        prop_assert!((0.0..=1.0 + 1e-15).contains(&d));
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let set = IntervalSet::interval(lo, hi).unwrap();
        prop_assert!(k.degree_wrt(x, &set).unwrap() <= set.measure() * k.bound() + 1e-15);
    }

    #[test]
    fn degree_is_additive_over_disjoint_sets(w in step_kernel(5, -1.0, 1.0), x in 0.0f64..1.0, cuts in prop::collection::vec(0.0f64..1.0, 3)) {
        let mut c = cuts.clone();
        c.sort_by(f64::total_cmp);
        let a = IntervalSet::interval(0.0, c[0]).unwrap();
        let b = IntervalSet::new(vec![(c[1], c[2])]).unwrap();
        let u = a.union(&b).unwrap();
        for k in [Kernel::Step(w.clone()), Kernel::Constant(0.7)] {
            let sum = k.degree_wrt(x, &a).unwrap() + k.degree_wrt(x, &b).unwrap();
            prop_assert!((k.degree_wrt(x, &u).unwrap() - sum).abs() <= 1e-10);
        }
    }

    #[test]
    fn analytic_degree_is_additive(x in 0.0f64..1.0, c in 0.05f64..0.95) {
        let k = cayley();
        let a = IntervalSet::interval(0.0, c).unwrap();
        let b = IntervalSet::interval(c, 1.0).unwrap();
        let sum = k.degree_wrt(x, &a).unwrap() + k.degree_wrt(x, &b).unwrap();
        prop_assert!((k.degree(x).unwrap() - sum).abs() <= 1e-10);
        prop_assert!((k.degree(x).unwrap() - 0.4).abs() <= 1e-10);
    }

    #[test]
    fn step_averaging_stays_in_range(w in step_kernel(6, -1.0, 1.0), k in 1usize..6) {
        let v = Kernel::Step(w.clone()).step_approximate(k).unwrap();
        for row in v.values() {
            for x in row {
                prop_assert!(x >= w.min_value() - 1e-12 && x <= w.max_value() + 1e-12);
            }
        }
    }

    #[test]
    fn split_block_keeps_the_kernel(w in step_kernel(5, 0.0, 1.0), i in 0usize..5, ratio in 0.1f64..0.9, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let i = i % w.k();
        let (fine, parent) = w.split_block(i, ratio).unwrap();
        prop_assert_eq!(fine.k(), w.k() + 1);
        prop_assert_eq!(fine.eval(x, y), w.eval(x, y));
        prop_assert_eq!(parent[fine.block_of(x)], w.block_of(x));
        prop_assert_eq!(cut_norm_exact(&fine).unwrap(), cut_norm_exact(&fine).unwrap());
    }
}

#[test]
fn analytic_step_approximation_stays_in_range() {
    let v = cayley().step_approximate(6).unwrap();
    for x in v.values().iter().flatten() {
        assert!((0.1 - 1e-12..=0.7 + 1e-12).contains(x));
    }
}
