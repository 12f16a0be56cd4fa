#![allow(dead_code)]

use graphon_core::graphon::StepKernel;
use graphon_core::rng::{Domain, Stream};
use proptest::prelude::*;

/// Step kernel with `k` blocks of uneven width and entries in `[lo, hi)`,
/// drawn from a counter stream.
pub fn seeded_step_kernel(seed: u64, k: usize, lo: f64, hi: f64) -> StepKernel {
    let s = Stream::new(seed, Domain::Scenario, 99);
    let widths: Vec<f64> = (0..k).map(|i| 0.25 + s.uniform(i as u64)).collect();
    let total: f64 = widths.iter().sum();
    let mut breaks = vec![0.0];
    let mut acc = 0.0;
    for w in &widths[..k - 1] {
        acc += w / total;
        breaks.push(acc);
    }
    breaks.push(1.0);
    let mut values = vec![vec![0.0; k]; k];
    let mut c = 1000u64;
    for i in 0..k {
        for j in i..k {
            let v = lo + (hi - lo) * s.uniform(c);
            c += 1;
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    StepKernel::new(breaks, values).unwrap()
}

/// Step kernels with up to `max_k` blocks and entries in `[lo, hi]`.
pub fn step_kernel(max_k: usize, lo: f64, hi: f64) -> impl Strategy<Value = StepKernel> {
    (1..=max_k).prop_flat_map(move |k| {
        (
            prop::collection::vec(0.1f64..1.0, k),
            prop::collection::vec(lo..=hi, k * (k + 1) / 2),
        )
            .prop_map(move |(widths, upper)| {
                let total: f64 = widths.iter().sum();
                let mut breaks = vec![0.0];
                let mut acc = 0.0;
                for w in &widths[..k - 1] {
                    acc += w / total;
                    breaks.push(acc);
                }
                breaks.push(1.0);
                let mut values = vec![vec![0.0; k]; k];
                let mut it = upper.into_iter();
                for i in 0..k {
                    for j in i..k {
                        let v = it.next().unwrap();
                        values[i][j] = v;
                        values[j][i] = v;
                    }
                }
                StepKernel::new(breaks, values).unwrap()
            })
    })
}

/// `max |Σ_{i∈S, j∈T} w_ij m_i m_j|` over all pairs of block subsets.
pub fn brute_force_cut_norm(w: &StepKernel) -> f64 {
    let k = w.k();
    let m = w.measures();
    let mut best: f64 = 0.0;
    for s in 0u32..(1 << k) {
        for t in 0u32..(1 << k) {
            let mut v = 0.0;
            for i in 0..k {
                for j in 0..k {
                    if s >> i & 1 == 1 && t >> j & 1 == 1 {
                        v += w.value(i, j) * m[i] * m[j];
                    }
                }
            }
            best = best.max(v.abs());
        }
    }
    best
}

/// Minimum of `Σ (a_i − b_π(i))²` over all permutations, by Heap's algorithm.
pub fn assignment_optimum(a: &[f64], b: &[f64]) -> f64 {
    let n = b.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let cost = |p: &[usize]| -> f64 { a.iter().zip(p).map(|(x, &j)| (x - b[j]).powi(2)).sum() };
    let mut best = cost(&perm);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(cost(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Gaussian samples by inverse-CDF transform of a counter stream.
pub fn gaussian_samples(seed: u64, n: usize, mean: f64, sd: f64) -> Vec<f64> {
    let s = Stream::new(seed, Domain::Scenario, 7);
    (0..n).map(|i| mean + sd * s.normal(i as u64)).collect()
}

/// Heat-equation solve from a cell-averaged `N(0, 0.5²)` on `[-l, l]` with
/// `m` cells over `[0, ½]`, with the exact cell averages at the end.
pub fn heat_solve(l: f64, m: usize, dt: f64) -> (graphon_core::pde::DensitySeries, Vec<f64>) {
    use graphon_core::dynamics::{CoefficientSet, Distribution};
    use graphon_core::pde::{solve_mckean_vlasov, SpatialGrid};
    let grid = SpatialGrid::new(l, m).unwrap();
    let init = grid
        .discretize(&Distribution::Gaussian { mean: 0.0, sd: 0.5 })
        .unwrap();
    let c = CoefficientSet::named("heat").unwrap();
    let series = solve_mckean_vlasov(0.0, &c, &init, &grid, 0.5, dt).unwrap();
    let exact = grid
        .discretize(&Distribution::Gaussian {
            mean: 0.0,
            sd: 0.75f64.sqrt(),
        })
        .unwrap();
    (series, exact)
}

/// L¹ distance to the exact heat solution at the final time.
pub fn heat_error(l: f64, m: usize, dt: f64) -> f64 {
    let (series, exact) = heat_solve(l, m, dt);
    series.grid.l1(&series.last().blocks[0], &exact)
}
