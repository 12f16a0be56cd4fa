//! Particle simulation: the finite system on a kernel, the reduced block
//! system on a step kernel, and shared-noise tagged particles.

mod coefficients;
mod config;
mod coupled;
mod engine;
mod ensemble;
mod init;
mod simulate;

pub use coefficients::{
    BoundsReport, CoefficientBounds, CoefficientSet, Diffusion, Interaction, PairFn, ScalarFn,
    COEFFICIENT_NAMES,
};
pub use config::{validate_time_grid, CouplingMode, LabelMode, SimConfig};
pub use coupled::{coupled_pair, coupled_tags, CoupledPairEstimate, CoupledTags};
pub use ensemble::{
    quantile_sorted, summarize, Provenance, SummaryRow, TrajectoryEnsemble, SUMMARY_QUANTILES,
};
pub use init::{Distribution, InitialDatum};
pub use simulate::{
    simulate_finite, simulate_finite_recording, simulate_reduced, simulate_reduced_recording,
};

pub(crate) use coupled::mean_and_stderr;
