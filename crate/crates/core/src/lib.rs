//! Numerics for graphon particle systems.
//!
//! * [`graphon`]: kernels on `[0,1]²`, degrees, step approximation, cut norm
//!   and cut distance, relabeling, and the degree-balance condition (H).
//! * [`dynamics`]: Euler–Maruyama simulation of finite particle systems on a
//!   kernel, of the reduced block system, and of shared-noise coupled pairs.
//! * [`pde`]: finite-volume solver for the coupled Fokker–Planck system on a
//!   step kernel.
//! * [`metrics`]: one-dimensional Wasserstein-2 distances and path-distance
//!   bounds.
//! * [`experiments`]: configuration, registry and scripted experiment runs.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod graphon;
pub mod metrics;
pub mod par;
pub mod pde;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
