//! Finite-volume solver for the block Fokker–Planck system on a truncated line.

mod grid;
mod refinement;
mod solver;

pub use grid::{SpatialGrid, MIN_CELLS};
pub use refinement::{
    refinement_gap, split_block_refinement_check, split_block_refinement_check_with,
    RefinementScenario, REFINEMENT_TOL,
};
pub use solver::{
    default_half_width, solve_fp_system, solve_fp_system_recording, solve_mckean_vlasov,
    DensityGrid, DensitySeries, MASS_TOL, NEG_TOL,
};
