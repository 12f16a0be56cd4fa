//! Wasserstein-2 distances between one-dimensional laws and bounds on the
//! path distance `D_T`.

mod bounds;
mod continuity;
mod wasserstein;

pub use bounds::{
    d_t_bounds_coupled, d_t_bounds_ensembles, d_t_lower, group_replicas, pooled_at,
    pooled_marginal, pooled_replicas, DtBounds, STDERR_BATCHES,
};
pub use continuity::{continuity_diagnostic, ContinuityReport, ContinuityRow, ContinuityScenario};
pub use wasserstein::{
    test_function_gap, wasserstein2, wasserstein2_samples, MeasureSnapshot, QUANTILE_MESH,
};
