mod common;

use common::{assignment_optimum, gaussian_samples};
use graphon_core::dynamics::Distribution;
use graphon_core::metrics::{
    test_function_gap, wasserstein2, wasserstein2_samples, MeasureSnapshot,
};
use graphon_core::pde::SpatialGrid;
use graphon_core::rng::{Domain, Stream};
use proptest::prelude::*;

fn gaussian_oracle(m1: f64, s1: f64, m2: f64, s2: f64) -> f64 {
    ((m1 - m2).powi(2) + (s1 - s2).powi(2)).sqrt()
}

fn gridded_gaussian(mean: f64, sd: f64) -> MeasureSnapshot {
    let grid = SpatialGrid::new(12.0, 6000).unwrap();
    let rho = grid
        .discretize(&Distribution::Gaussian { mean, sd })
        .unwrap();
    MeasureSnapshot::gridded(grid, rho).unwrap()
}

#[test]
fn empirical_gaussians_match_the_closed_form() {
    let n = 10_000;
    let tol = 3.0 / (n as f64).sqrt();
    let cases = [
        (0.0, 1.0, 1.0, 1.0),
        (0.0, 1.0, 0.5, 2.0),
        (-1.0, 0.5, 1.0, 1.5),
    ];
    for (i, &(m1, s1, m2, s2)) in cases.iter().enumerate() {
        let a = gaussian_samples(2 * i as u64, n, m1, s1);
        let b = gaussian_samples(2 * i as u64 + 1, n, m2, s2);
        let exact = gaussian_oracle(m1, s1, m2, s2);
        let w = wasserstein2_samples(&a, &b).unwrap();
        assert!((w - exact).abs() <= tol, "case {i}: {w} vs {exact}");
        let a = MeasureSnapshot::empirical(a).unwrap();
        let w = wasserstein2(&a, &gridded_gaussian(m2, s2)).unwrap();
        assert!((w - exact).abs() <= tol, "case {i} gridded: {w} vs {exact}");
    }
}

#[test]
fn gridded_gaussians_match_the_closed_form() {
    let w = wasserstein2(&gridded_gaussian(0.0, 1.0), &gridded_gaussian(1.0, 1.0)).unwrap();
    assert!((w - 1.0).abs() < 1e-3, "{w}");
    let w = wasserstein2(&gridded_gaussian(0.0, 0.5), &gridded_gaussian(0.0, 1.5)).unwrap();
    assert!((w - 1.0).abs() < 5e-3, "{w}");
}

#[test]
fn triangle_inequality_on_random_triples() {
    let s = Stream::new(17, Domain::Scenario, 1);
    for t in 0..100u64 {
        let n = 1 + (s.bits(t) % 50) as usize;
        let draw = |k: u64| -> Vec<f64> {
            (0..n as u64)
                .map(|j| 3.0 * s.normal(10_000 * (3 * t + k) + j))
                .collect()
        };
        let (a, b, c) = (draw(0), draw(1), draw(2));
        let ab = wasserstein2_samples(&a, &b).unwrap();
        let bc = wasserstein2_samples(&b, &c).unwrap();
        let ac = wasserstein2_samples(&a, &c).unwrap();
        assert!(ac <= ab + bc + 1e-12, "triple {t}");
    }
}

#[test]
fn lipschitz_functions_are_controlled() {
    let a = MeasureSnapshot::empirical(gaussian_samples(1, 2000, 0.0, 1.0)).unwrap();
    let b = MeasureSnapshot::empirical(gaussian_samples(2, 3000, 0.4, 0.7)).unwrap();
    let g = gridded_gaussian(-0.3, 1.2);
    for (x, y) in [(&a, &b), (&a, &g), (&b, &g)] {
        let w = wasserstein2(x, y).unwrap();
        assert!(test_function_gap(x, y, f64::sin) <= w);
        assert!(test_function_gap(x, y, f64::tanh) <= w);
        assert!(test_function_gap(x, y, |v| v.clamp(-1.0, 1.0)) <= w);
    }
}

#[test]
fn gridded_and_empirical_moments_agree() {
    let g = gridded_gaussian(0.5, 0.8);
    assert!((g.mean() - 0.5).abs() < 1e-6);
    assert!((g.variance() - 0.64).abs() < 1e-5);
    let e = MeasureSnapshot::empirical(gaussian_samples(4, 10_000, 0.5, 0.8)).unwrap();
    assert!(wasserstein2(&g, &e).unwrap() < 0.03);
}

fn samples(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sorted_pairing_is_the_assignment_optimum(pair in (1usize..=8).prop_flat_map(|n| {
        (prop::collection::vec(-5.0f64..5.0, n), prop::collection::vec(-5.0f64..5.0, n))
    })) {
        let (mut a, b) = pair;
        let n = a.len();
        a.sort_by(f64::total_cmp);
        let mut sb = b.clone();
        sb.sort_by(f64::total_cmp);
        let best = assignment_optimum(&a, &sb);
        prop_assert_eq!(wasserstein2_samples(&a, &b).unwrap(), (best / n as f64).sqrt());
    }

    #[test]
    fn metric_axioms(a in samples(40), b in samples(40)) {
        let ab = wasserstein2_samples(&a, &b).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, wasserstein2_samples(&b, &a).unwrap());
        prop_assert_eq!(wasserstein2_samples(&a, &a).unwrap(), 0.0);
        let mut shuffled = a.clone();
        shuffled.reverse();
        prop_assert_eq!(wasserstein2_samples(&a, &shuffled).unwrap(), 0.0);
    }

    #[test]
    fn shift_moves_by_its_size(a in samples(40), c in -3.0f64..3.0) {
        let b: Vec<f64> = a.iter().map(|x| x + c).collect();
        prop_assert!((wasserstein2_samples(&a, &b).unwrap() - c.abs()).abs() <= 1e-12);
    }

    #[test]
    fn point_masses(x in -10.0f64..10.0, y in -10.0f64..10.0) {
        prop_assert_eq!(wasserstein2_samples(&[x], &[y]).unwrap(), (x - y).abs());
    }
}
