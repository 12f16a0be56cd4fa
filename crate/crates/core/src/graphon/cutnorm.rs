//! Cut norm and cut distance of step kernels.
//!
//! For a step kernel with block masses `a_ij = w_ij m_i m_j` the cut norm is
//! `max_{s,t ∈ [0,1]^k} |Σ_ij a_ij s_i t_j|`. The objective is bilinear, so the
//! maximum is attained at a vertex `s, t ∈ {0,1}^k`, and for fixed `s` the best
//! `t` keeps either all positive or all negative column sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::step::StepKernel;
use crate::par;
use crate::rng::{Domain, Stream};

pub const EXACT_MAX_BLOCKS: usize = 20;
pub const HEURISTIC_RESTARTS: usize = 8;
pub const EXACT_PERMUTATION_MAX_BLOCKS: usize = 8;
const HEURISTIC_SEED: u64 = 0xC07E_5EED;
const PERMUTATION_SAMPLES: usize = 5040;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CutNormMode {
    #[default]
    Exact,
    Heuristic,
}

impl std::str::FromStr for CutNormMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(CutNormMode::Exact),
            "heuristic" => Ok(CutNormMode::Heuristic),
            other => Err(Error::config(format!("unknown cut-norm mode '{other}'"))),
        }
    }
}

/// `max_t |Σ_ij a_ij s_i t_j|` for the subset `s` encoded as a bit mask.
#[inline]
fn best_over_t(a: &[f64], k: usize, s: u64) -> f64 {
    let mut pos = 0.0;
    let mut neg = 0.0;
    for j in 0..k {
        let mut r = 0.0;
        for i in 0..k {
            if s >> i & 1 == 1 {
                r += a[i * k + j];
            }
        }
        if r > 0.0 {
            pos += r;
        } else {
            neg -= r;
        }
    }
    if pos >= neg {
        pos
    } else {
        neg
    }
}

pub fn cut_norm(w: &StepKernel, mode: CutNormMode) -> Result<f64> {
    match mode {
        CutNormMode::Exact => cut_norm_exact(w),
        CutNormMode::Heuristic => Ok(cut_norm_heuristic(w, HEURISTIC_RESTARTS, HEURISTIC_SEED)),
    }
}

/// Enumerates all `2^k` row subsets.
pub fn cut_norm_exact(w: &StepKernel) -> Result<f64> {
    let k = w.k();
    if k > EXACT_MAX_BLOCKS {
        return Err(Error::Capability(format!(
            "exact cut norm supports k <= {EXACT_MAX_BLOCKS} blocks (got {k}); use heuristic mode"
        )));
    }
    let a = w.weighted_masses();
    // The full square is also scored in the summation order of `integral`.
    Ok(par::max_over(1u64 << k, |s| best_over_t(&a, k, s)).max(w.integral().abs()))
}

/// Alternating maximization over `(s, t)` followed by single-flip local
/// search on `s`, from `restarts` random starts. The returned value is the
/// objective at a feasible vertex, so it never exceeds the exact value.
pub fn cut_norm_heuristic(w: &StepKernel, restarts: usize, seed: u64) -> f64 {
    let k = w.k();
    let a = w.weighted_masses();
    let full = if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut best = best_over_t(&a, k, full).max(w.integral().abs());
    for r in 0..restarts as u64 {
        let stream = Stream::new(seed, Domain::Search, r);
        let mut s = stream.bits(0) & full;
        let mut value = best_over_t(&a, k, s);
        loop {
            let next = alternate(&a, k, s);
            let next_value = best_over_t(&a, k, next);
            let (flipped, flipped_value) = best_single_flip(&a, k, next, next_value);
            if flipped_value > value {
                s = flipped;
                value = flipped_value;
            } else {
                break;
            }
        }
        best = best.max(value);
    }
    best
}

/// One `t`-then-`s` best-response sweep for the sign that `s` currently favours.
fn alternate(a: &[f64], k: usize, s: u64) -> u64 {
    let mut col = vec![0.0; k];
    for (j, c) in col.iter_mut().enumerate() {
        for i in 0..k {
            if s >> i & 1 == 1 {
                *c += a[i * k + j];
            }
        }
    }
    let pos: f64 = col.iter().filter(|&&c| c > 0.0).sum();
    let neg: f64 = -col.iter().filter(|&&c| c < 0.0).sum::<f64>();
    let sign = if pos >= neg { 1.0 } else { -1.0 };
    let mut next = 0u64;
    for i in 0..k {
        let row: f64 = (0..k)
            .filter(|&j| sign * col[j] > 0.0)
            .map(|j| a[i * k + j])
            .sum();
        if sign * row > 0.0 {
            next |= 1 << i;
        }
    }
    next
}

fn best_single_flip(a: &[f64], k: usize, s: u64, value: f64) -> (u64, f64) {
    let mut best = (s, value);
    for i in 0..k {
        let cand = s ^ (1 << i);
        let v = best_over_t(a, k, cand);
        if v > best.1 {
            best = (cand, v);
        }
    }
    best
}

/// Minimum cut norm of `W − V^φ` over block permutations `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutDistance {
    pub value: f64,
    /// Permutation applied to `V` at the minimum.
    pub permutation: Vec<usize>,
    /// True when every admissible permutation was examined.
    pub exhaustive: bool,
}

/// Upper bound on the cut distance obtained by minimizing over block
/// permutations only; it is exact whenever the optimal measure-preserving
/// relabeling is a block permutation.
pub fn cut_distance_step(w: &StepKernel, v: &StepKernel, mode: CutNormMode) -> Result<CutDistance> {
    if w.k() != v.k() {
        return Err(Error::shape(format!(
            "block counts differ: {} vs {}",
            w.k(),
            v.k()
        )));
    }
    let k = w.k();
    let (mw, mv) = (w.measures(), v.measures());
    if mw.iter().zip(&mv).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(Error::shape(
            "block measures differ between the two kernels",
        ));
    }
    let admissible = |perm: &[usize]| {
        perm.iter()
            .enumerate()
            .all(|(i, &p)| (mw[i] - mw[p]).abs() <= 1e-12)
    };

    let evaluate = |perm: &[usize], norm_mode: CutNormMode| -> Result<f64> {
        let vp = v.relabel(perm)?;
        cut_norm(&w.difference(&vp)?, norm_mode)
    };

    let total = factorial(k);
    let (candidates, exhaustive, norm_mode) = match mode {
        CutNormMode::Exact => {
            if k > EXACT_PERMUTATION_MAX_BLOCKS {
                return Err(Error::Capability(format!(
                    "exact cut distance supports k <= {EXACT_PERMUTATION_MAX_BLOCKS} blocks (got {k}); use heuristic mode"
                )));
            }
            (all_permutations(k), true, CutNormMode::Exact)
        }
        CutNormMode::Heuristic => match total {
            Some(n) if n <= PERMUTATION_SAMPLES => {
                (all_permutations(k), true, CutNormMode::Heuristic)
            }
            _ => (
                sampled_permutations(k, PERMUTATION_SAMPLES),
                false,
                CutNormMode::Heuristic,
            ),
        },
    };

    let mut best: Option<CutDistance> = None;
    for perm in candidates.into_iter().filter(|p| admissible(p)) {
        let value = evaluate(&perm, norm_mode)?;
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(CutDistance {
                value,
                permutation: perm,
                exhaustive,
            });
        }
    }
    Ok(best.expect("identity permutation is always admissible"))
}

fn factorial(k: usize) -> Option<usize> {
    (1..=k).try_fold(1usize, |acc, i| acc.checked_mul(i))
}

/// All permutations of `0..k` in lexicographic order.
pub fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut out = vec![perm.clone()];
    while next_permutation(&mut perm) {
        out.push(perm.clone());
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn sampled_permutations(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![(0..k).collect::<Vec<_>>()];
    for r in 1..n as u64 {
        let stream = Stream::new(HEURISTIC_SEED, Domain::Search, 1 << 32 | r);
        let mut perm: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            let j = (stream.uniform(i as u64) * (i + 1) as f64) as usize;
            perm.swap(i, j.min(i));
        }
        out.push(perm);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_kernel_cut_norm_is_its_absolute_value() {
        assert_eq!(cut_norm_exact(&StepKernel::constant(0.7)).unwrap(), 0.7);
        assert_eq!(cut_norm_exact(&StepKernel::constant(-0.3)).unwrap(), 0.3);
    }

    #[test]
    fn checkerboard_cut_norm_is_a_quarter() {
        let a = 0.8;
        let w = StepKernel::uniform(vec![vec![a, -a], vec![-a, a]]).unwrap();
        assert!((cut_norm_exact(&w).unwrap() - a / 4.0).abs() < 1e-15);
        assert!((cut_norm_heuristic(&w, 8, 1) - a / 4.0).abs() < 1e-15);
    }

    #[test]
    fn exact_mode_refuses_large_k() {
        let w = StepKernel::uniform(vec![vec![0.5; 21]; 21]).unwrap();
        assert!(matches!(cut_norm_exact(&w), Err(Error::Capability(_))));
        assert!((cut_norm(&w, CutNormMode::Heuristic).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn permutations_enumerate_k_factorial() {
        assert_eq!(all_permutations(4).len(), 24);
        assert_eq!(all_permutations(1), vec![vec![0]]);
        let s = sampled_permutations(10, 50);
        assert!(s.iter().all(|p| {
            let mut q = p.clone();
            q.sort();
            q == (0..10).collect::<Vec<_>>()
        }));
    }

    #[test]
    fn cut_distance_examples() {
        let w = StepKernel::uniform(vec![
            vec![0.9, 0.1, 0.3],
            vec![0.1, 0.2, 0.5],
            vec![0.3, 0.5, 0.7],
        ])
        .unwrap();
        let v = w.relabel(&[2, 0, 1]).unwrap();
        let d = cut_distance_step(&w, &v, CutNormMode::Exact).unwrap();
        assert_eq!(d.value, 0.0);
        let p = StepKernel::constant(0.6);
        let q = StepKernel::constant(0.25);
        assert!(
            (cut_distance_step(&p, &q, CutNormMode::Exact).unwrap().value - 0.35).abs() < 1e-15
        );
        let other = StepKernel::new(vec![0.0, 0.2, 1.0], vec![vec![0.0; 2]; 2]).unwrap();
        let even = StepKernel::uniform(vec![vec![0.0; 2]; 2]).unwrap();
        assert!(matches!(
            cut_distance_step(&other, &even, CutNormMode::Exact),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn unequal_blocks_only_swap_with_equal_measure_blocks() {
        let w = StepKernel::new(
            vec![0.0, 0.25, 0.5, 1.0],
            vec![
                vec![0.1, 0.2, 0.3],
                vec![0.2, 0.8, 0.4],
                vec![0.3, 0.4, 0.6],
            ],
        )
        .unwrap();
        let v = w.relabel(&[1, 0, 2]).unwrap();
        let d = cut_distance_step(&w, &v, CutNormMode::Exact).unwrap();
        assert_eq!(d.value, 0.0);
        assert_eq!(d.permutation, vec![1, 0, 2]);
    }
}
