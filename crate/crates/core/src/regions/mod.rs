//! Measurable sets in the four geometries and their maximum Nyquist densities.
//!
//! `rho_line` is exact. The planar, spherical and hyperbolic densities are
//! grid searches that return a [`DensityEstimate`] with a refinement-based
//! error estimate; recovery gating uses [`DensityEstimate::conservative`].
//!
//! The planar density is the raw measure `sup_z |Ω ∩ (z + D_R)|`, not divided
//! by `|D_R|`, while the spherical density is a ratio of areas. Each follows the
//! inequality that consumes it.

mod disc;
mod kernel;
mod line;
mod plane;
mod sphere;

use serde::Serialize;

pub use disc::{
    pseudo_ball_euclidean, pseudohyperbolic_distance, rho_hyperbolic, DiscGrid, DiscRegion, PseudoBall, DEFAULT_R_MAX,
};
pub use kernel::kernel_concentration;
pub use line::{
    discrete_density, max_window_coverage_periodic, rho_line, IntervalUnion, PeriodicMeasure,
};
pub use plane::{rho_plane, Disc, PlanarRegion, PlaneDensityOptions, PlaneRaster};
pub use sphere::{fibonacci_lattice, rho_sphere, Cap, SphereDensityOptions, SphereRaster, SphericalRegion, Vec3};

/// A density value together with an estimate of its numerical error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub error_estimate: f64,
}

impl DensityEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error_estimate: 0.0 }
    }

    /// `value + error_estimate`, the figure compared against thresholds.
    pub fn conservative(&self) -> f64 {
        self.value + self.error_estimate
    }
}
