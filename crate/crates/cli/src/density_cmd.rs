use serde::{Deserialize, Serialize};
use serde_json::json;
use sievekit::constants::{compute_b_l, compute_c_alpha, gabor_recovery_threshold, recovery_threshold_line};
use sievekit::regions::{
    discrete_density, rho_hyperbolic, rho_line, rho_plane, rho_sphere, DensityEstimate, DiscRegion, IntervalUnion,
    PlanarRegion, PlaneDensityOptions, PseudoBall, SphereDensityOptions, SphericalRegion, DEFAULT_R_MAX,
};

use crate::{to_value, CliResult, Outcome, EXIT_OK};

fn default_cell() -> f64 {
    0.01
}

fn default_r_max() -> f64 {
    DEFAULT_R_MAX
}

/// A region file. The `geometry` tag selects the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "lowercase", deny_unknown_fields)]
pub enum RegionSpec {
    /// Interval union on the line; window `[t, t + 1/W]`.
    Line {
        intervals: IntervalUnion,
        #[serde(rename = "W")]
        bandwidth: f64,
    },
    /// Index set of `Z_N` against a band of `band` consecutive frequencies.
    Discrete {
        #[serde(rename = "N")]
        n: usize,
        band: usize,
        indices: Vec<usize>,
    },
    /// Planar set; window `z + D_R`.
    Plane {
        #[serde(rename = "R")]
        radius: f64,
        region: PlanarRegion,
        #[serde(default)]
        options: PlaneDensityOptions,
    },
    /// Spherical set; window the cap of angle `arccos t_{L,L}`.
    Sphere {
        #[serde(rename = "L")]
        degree: usize,
        region: SphericalRegion,
        #[serde(default)]
        options: SphereDensityOptions,
    },
    /// Union of pseudohyperbolic balls in the disc; window `B(z, R)`.
    Disc {
        #[serde(rename = "R")]
        radius: f64,
        balls: Vec<PseudoBall>,
        #[serde(default = "default_cell")]
        cell: f64,
        #[serde(default = "default_r_max")]
        r_max: f64,
        /// Bergman weight exponent; enables the disc recovery threshold.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub name: &'static str,
    pub threshold: f64,
    pub cleared: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub geometry: &'static str,
    pub value: f64,
    pub error_estimate: f64,
    pub conservative: f64,
    pub thresholds: Vec<Threshold>,
    /// `"cleared"` or `"not cleared"` for the first threshold.
    pub gate: &'static str,
}

fn threshold(name: &'static str, t: f64, rho: &DensityEstimate) -> Threshold {
    Threshold { name, threshold: t, cleared: rho.conservative() < t }
}

/// Evaluates the density of a region file and compares it with the recovery
/// thresholds of its geometry, always on the conservative value.
pub fn run_density(spec: &RegionSpec) -> CliResult<Outcome> {
    let (geometry, rho, thresholds) = match spec {
        RegionSpec::Line { intervals, bandwidth } => {
            let rho = DensityEstimate::exact(rho_line(intervals, *bandwidth)?);
            ("line", rho, vec![threshold("line recovery 1/pi", recovery_threshold_line(), &rho)])
        }
        RegionSpec::Discrete { n, band, indices } => {
            let rho = DensityEstimate::exact(discrete_density(indices, *n, *band)?);
            ("discrete", rho, vec![threshold("line recovery 1/pi", recovery_threshold_line(), &rho)])
        }
        RegionSpec::Plane { radius, region, options } => {
            let rho = rho_plane(region, *radius, options)?;
            let t = gabor_recovery_threshold(*radius)?;
            ("plane", rho, vec![threshold("gaussian window recovery (1-exp(-pi R^2))/2", t, &rho)])
        }
        RegionSpec::Sphere { degree, region, options } => {
            let rho = rho_sphere(region, *degree, options)?;
            let t = 0.5 / compute_b_l(*degree)?;
            ("sphere", rho, vec![threshold("L2 concentration below 1/2: 1/(2 B_L)", t, &rho)])
        }
        RegionSpec::Disc { radius, balls, cell, r_max, alpha } => {
            let region = DiscRegion::from_balls(*cell, *r_max, balls)?;
            let rho = rho_hyperbolic(&region, *radius)?;
            let mut ts = Vec::new();
            if let Some(a) = alpha {
                ts.push(threshold("Bergman recovery C^alpha(R)/4", compute_c_alpha(*a, *radius)? / 4.0, &rho));
            }
            ("disc", rho, ts)
        }
    };
    let gate = match thresholds.first() {
        Some(t) if t.cleared => "cleared",
        Some(_) => "not cleared",
        None => "no threshold",
    };
    let report = DensityReport {
        geometry,
        value: rho.value,
        error_estimate: rho.error_estimate,
        conservative: rho.conservative(),
        thresholds,
        gate,
    };
    Ok(Outcome {
        command: "density".into(),
        seed: 0,
        config: to_value(spec),
        result: json!(report),
        exit_code: EXIT_OK,
        csv: None,
    })
}
