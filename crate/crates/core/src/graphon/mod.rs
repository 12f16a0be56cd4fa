//! Kernels, degrees, step approximation, cut norm and condition (H).

mod condition;
mod cutnorm;
mod kernel;
mod partition;
pub mod spec;
mod step;

pub use condition::{
    check_condition_h, default_tolerance, ConditionReport, ANALYTIC_TOLERANCE, STEP_TOLERANCE,
};
pub use cutnorm::{
    all_permutations, cut_distance_step, cut_norm, cut_norm_exact, cut_norm_heuristic, CutDistance,
    CutNormMode, EXACT_MAX_BLOCKS, HEURISTIC_RESTARTS,
};
pub use kernel::{AnalyticKernel, CayleyProfile, Kernel, KernelFn};
pub use partition::{equipartition, IntervalSet, LabelPartition};
pub use step::StepKernel;
