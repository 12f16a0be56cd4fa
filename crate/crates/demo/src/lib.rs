//! Browser bindings: kernel heatmaps with degree profiles, cut norms, and
//! block densities of the Fokker-Planck system next to the mean-field law.

use std::path::Path;

use graphon_core::dynamics::{CoefficientSet, Distribution};
use graphon_core::experiments::resolve_kernel;
use graphon_core::graphon::{cut_norm, CutNormMode, Kernel, StepKernel};
use graphon_core::pde::{solve_fp_system_recording, solve_mckean_vlasov, SpatialGrid};
use wasm_bindgen::prelude::*;

type JsResult<T> = Result<T, JsError>;

fn js(e: graphon_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// A registry name, a kernel specification, or a matrix such as
/// `0.9 0.1; 0.1 0.6` on an equipartition.
fn kernel(text: &str) -> JsResult<Kernel> {
    let text = text.trim();
    if text.contains(';') || text.starts_with(|c: char| c.is_ascii_digit()) && text.contains(' ') {
        let rows = text
            .split(';')
            .map(|row| {
                row.split_whitespace()
                    .map(graphon_core::graphon::spec::parse_number)
                    .collect::<graphon_core::Result<Vec<f64>>>()
            })
            .collect::<graphon_core::Result<Vec<_>>>()
            .map_err(js)?;
        return StepKernel::uniform(rows).map(Kernel::Step).map_err(js);
    }
    resolve_kernel(text, Path::new(".")).map_err(js)
}

fn step(k: &Kernel, blocks: usize) -> JsResult<StepKernel> {
    match k {
        Kernel::Constant(p) => Ok(StepKernel::constant(*p)),
        Kernel::Step(s) => Ok(s.clone()),
        Kernel::Analytic(_) => k.step_approximate(blocks).map_err(js),
    }
}

/// `W` at the centers of a `cells × cells` grid, row-major.
#[wasm_bindgen]
pub fn kernel_heatmap(spec: &str, cells: usize) -> JsResult<Vec<f64>> {
    let w = kernel(spec)?;
    let n = cells.max(1);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
            out.push(w.eval(x, y).map_err(js)?);
        }
    }
    Ok(out)
}

/// Degrees `d(x)` at `points` evenly spaced labels.
#[wasm_bindgen]
pub fn degree_profile(spec: &str, points: usize) -> JsResult<Vec<f64>> {
    let w = kernel(spec)?;
    let n = points.max(1);
    (0..n)
        .map(|i| w.degree((i as f64 + 0.5) / n as f64).map_err(js))
        .collect()
}

/// Cut norm of `a − b` after approximating analytic kernels by `blocks`
/// steps; both are averaged onto their common refinement first.
#[wasm_bindgen]
pub fn cut_norm_between(a: &str, b: &str, blocks: usize) -> JsResult<f64> {
    let (wa, wb) = (step(&kernel(a)?, blocks)?, step(&kernel(b)?, blocks)?);
    let mut breaks: Vec<f64> = wa
        .breakpoints()
        .iter()
        .chain(wb.breakpoints())
        .copied()
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let fa = wa.averaged_onto(breaks.clone()).map_err(js)?;
    let fb = wb.averaged_onto(breaks).map_err(js)?;
    let mode = if fa.k() <= 12 {
        CutNormMode::Exact
    } else {
        CutNormMode::Heuristic
    };
    cut_norm(&fa.difference(&fb).map_err(js)?, mode).map_err(js)
}

/// Final-time block densities of a step kernel started from one common
/// Gaussian, next to the single-population law with `p` = mean degree.
#[wasm_bindgen]
pub struct DensityComparison {
    centers: Vec<f64>,
    blocks: Vec<Vec<f64>>,
    weights: Vec<f64>,
    meanfield: Vec<f64>,
}

#[wasm_bindgen]
impl DensityComparison {
    pub fn centers(&self) -> Vec<f64> {
        self.centers.clone()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize) -> Vec<f64> {
        self.blocks.get(i).cloned().unwrap_or_default()
    }

    /// Block measures.
    pub fn weights(&self) -> Vec<f64> {
        self.weights.clone()
    }

    pub fn meanfield(&self) -> Vec<f64> {
        self.meanfield.clone()
    }

    /// `L¹` distance of each block density from the mean-field density.
    pub fn gaps(&self) -> Vec<f64> {
        let h = self.centers.get(1).map_or(1.0, |c| c - self.centers[0]);
        self.blocks
            .iter()
            .map(|b| {
                h * b
                    .iter()
                    .zip(&self.meanfield)
                    .map(|(x, y)| (x - y).abs())
                    .sum::<f64>()
            })
            .collect()
    }
}

#[wasm_bindgen]
pub fn compare_densities(
    spec: &str,
    coefficients: &str,
    horizon: f64,
    init_mean: f64,
    init_sd: f64,
) -> JsResult<DensityComparison> {
    let w = step(&kernel(spec)?, 8)?;
    let coeffs = CoefficientSet::named(coefficients).map_err(js)?;
    let grid = SpatialGrid::new(6.0, 160).map_err(js)?;
    let init = grid
        .discretize(&Distribution::Gaussian {
            mean: init_mean,
            sd: init_sd,
        })
        .map_err(js)?;
    let dt = 2e-3;
    let steps = (horizon / dt).round().max(1.0) as usize;
    let horizon = steps as f64 * dt;
    let series = solve_fp_system_recording(
        &w,
        &coeffs,
        &vec![init.clone(); w.k()],
        &grid,
        horizon,
        dt,
        steps,
    )
    .map_err(js)?;
    let p = w.integral().clamp(0.0, 1.0);
    let mv = solve_mckean_vlasov(p, &coeffs, &init, &grid, horizon, dt).map_err(js)?;
    Ok(DensityComparison {
        centers: grid.centers(),
        blocks: series.last().blocks.clone(),
        weights: w.measures(),
        meanfield: mv.last().blocks[0].clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrices_and_names_parse() {
        assert_eq!(
            kernel_heatmap("0.5 0; 0 0.5", 2).unwrap(),
            vec![0.5, 0.0, 0.0, 0.5]
        );
        let d = degree_profile("fig1-disconnected", 6).unwrap();
        assert!(d.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-10));
    }

    #[test]
    fn cut_norm_handles_different_blocks() {
        let c = cut_norm_between("fig1-disconnected", "constant:1/3", 8).unwrap();
        assert!(c > 0.0 && c < 1.0);
        assert_eq!(
            cut_norm_between("fig2-step3", "fig2-step3", 8).unwrap(),
            0.0
        );
    }

    #[test]
    fn equal_degree_blocks_match_the_mean_field_law() {
        let r = compare_densities("fig1-disconnected", "kuramoto", 0.5, 0.5, 1.0).unwrap();
        assert_eq!(r.block_count(), 2);
        assert!(r.gaps().iter().all(|&g| g < 1e-10));
        let r = compare_densities("h-violating2", "kuramoto", 0.5, 0.5, 1.0).unwrap();
        assert!(r.gaps().iter().any(|&g| g > 1e-3));
    }
}
