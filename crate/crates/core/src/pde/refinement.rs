use crate::dynamics::{CoefficientSet, Distribution};
use crate::error::{Error, Result};
use crate::graphon::StepKernel;
use crate::pde::grid::SpatialGrid;
use crate::pde::solver::solve_fp_system;

/// Largest density gap tolerated between a sub-block and its parent.
pub const REFINEMENT_TOL: f64 = 1e-12;

/// Scenario used to compare a kernel with a refinement of it.
#[derive(Debug, Clone)]
pub struct RefinementScenario {
    pub coeffs: CoefficientSet,
    pub grid: SpatialGrid,
    pub horizon: f64,
    pub dt: f64,
    /// Initial law of each coarse block, cycled if shorter than `k`.
    pub laws: Vec<Distribution>,
}

impl Default for RefinementScenario {
    fn default() -> Self {
        RefinementScenario {
            coeffs: CoefficientSet::named("kuramoto").expect("built-in coefficient set"),
            grid: SpatialGrid::new(6.0, 120).expect("valid grid"),
            horizon: 0.1,
            dt: 1e-3,
            laws: vec![
                Distribution::Gaussian {
                    mean: -1.0,
                    sd: 0.7,
                },
                Distribution::Gaussian { mean: 0.5, sd: 0.5 },
                Distribution::Gaussian { mean: 1.5, sd: 0.9 },
            ],
        }
    }
}

/// Largest sup-norm gap, over all frames, between each fine block and the
/// coarse block it refines (`parent[fine] = coarse`).
pub fn refinement_gap(
    coarse: &StepKernel,
    fine: &StepKernel,
    parent: &[usize],
    scenario: &RefinementScenario,
) -> Result<f64> {
    if parent.len() != fine.k() || parent.iter().any(|&p| p >= coarse.k()) {
        return Err(Error::shape("parent map does not match the kernels"));
    }
    let s = scenario;
    let laws: Vec<Vec<f64>> = (0..coarse.k())
        .map(|b| s.grid.discretize(&s.laws[b % s.laws.len()]))
        .collect::<Result<_>>()?;
    let fine_init: Vec<Vec<f64>> = parent.iter().map(|&p| laws[p].clone()).collect();
    let a = solve_fp_system(coarse, &s.coeffs, &laws, &s.grid, s.horizon, s.dt)?;
    let b = solve_fp_system(fine, &s.coeffs, &fine_init, &s.grid, s.horizon, s.dt)?;
    let mut gap: f64 = 0.0;
    for (fa, fb) in a.frames.iter().zip(&b.frames) {
        for (f, &p) in parent.iter().enumerate() {
            for (x, y) in fa.blocks[p].iter().zip(&fb.blocks[f]) {
                gap = gap.max((x - y).abs());
            }
        }
    }
    Ok(gap)
}

/// Splits block `i` of `w` at `ratio` and checks that both halves evolve
/// exactly like the parent block under the default scenario.
pub fn split_block_refinement_check(w: &StepKernel, i: usize, ratio: f64) -> Result<bool> {
    split_block_refinement_check_with(w, i, ratio, &RefinementScenario::default())
}

pub fn split_block_refinement_check_with(
    w: &StepKernel,
    i: usize,
    ratio: f64,
    scenario: &RefinementScenario,
) -> Result<bool> {
    let (fine, parent) = w.split_block(i, ratio)?;
    Ok(refinement_gap(w, &fine, &parent, scenario)? <= REFINEMENT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_kernel_splits_cleanly() {
        assert!(split_block_refinement_check(&StepKernel::constant(0.4), 0, 0.3).unwrap());
    }

    #[test]
    fn perturbed_split_is_detected() {
        let w = StepKernel::uniform(vec![vec![0.8, 0.2], vec![0.2, 0.5]]).unwrap();
        let (fine, parent) = w.split_block(0, 0.5).unwrap();
        let mut v = fine.values();
        v[0][0] += 0.1;
        let perturbed = StepKernel::new(fine.breakpoints().to_vec(), v).unwrap();
        let s = RefinementScenario::default();
        assert!(refinement_gap(&w, &fine, &parent, &s).unwrap() <= REFINEMENT_TOL);
        assert!(refinement_gap(&w, &perturbed, &parent, &s).unwrap() > 1e-6);
    }
}
