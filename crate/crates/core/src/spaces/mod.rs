//! Discretised function spaces, concentration ratios and empirical checks of
//! the large sieve inequalities.

mod bergman;
mod bombieri;
mod gabor;
mod pw;
mod sphere;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use bergman::{
    bergman_field, bergman_kernel, bergman_norm_sq_exact, verify_bergman_sieve, verify_local_reproducing_disc,
    Polynomial,
};
pub use bombieri::{random_point_measure, verify_bombieri, TrigPolynomial};
pub use gabor::{
    stft_hermite, stft_hermite_at, time_frequency_kernel, verify_gabor_sieve, verify_local_reproducing_plane,
    HermiteExpansion, PlaneGrid, StftQuadrature,
};
pub use pw::{band_dictionary, contiguous_band, verify_pw_sieve, DiscreteSignal};
pub use sphere::{sphere_lambda1_search, sphere_lambda2, SphericalExpansion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Plane,
    Disc,
}

/// Samples of a function on a phase-space grid with their quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceField {
    pub geometry: Geometry,
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl PhaseSpaceField {
    pub fn norm_p(&self, p: f64) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v.norm().powf(p) * w).sum()
    }

    pub fn ratio(&self, mask: &[bool], p: f64) -> Result<f64> {
        concentration_ratio(&self.values, &self.weights, mask, p)
    }
}

/// `‖f χ_Ω‖_p^p / ‖f‖_p^p` for weighted samples.
pub fn concentration_ratio(values: &[Complex64], weights: &[f64], mask: &[bool], p: f64) -> Result<f64> {
    if values.len() != weights.len() || values.len() != mask.len() {
        return Err(Error::Shape(format!(
            "values {}, weights {}, mask {} must have equal length",
            values.len(),
            weights.len(),
            mask.len()
        )));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return domain(format!("exponent p must be finite and >= 1, got {p}"));
    }
    let (mut inside, mut total) = (0.0, 0.0);
    for ((v, &w), &m) in values.iter().zip(weights).zip(mask) {
        let a = v.norm().powf(p) * w;
        total += a;
        if m {
            inside += a;
        }
    }
    if !(total > 0.0) {
        return domain("concentration ratio of the zero function is undefined");
    }
    Ok((inside / total).clamp(0.0, 1.0))
}

/// Observed ratio and bound for one member of a verification corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRatio {
    pub index: usize,
    pub observed: f64,
    pub bound: f64,
}

impl TrialRatio {
    pub fn margin(&self) -> f64 {
        self.bound - self.observed
    }
}

/// Outcome of an inequality check over a corpus. `observed` and `bound` are
/// taken from the trial with the smallest margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub p: f64,
    pub observed: f64,
    pub bound: f64,
    pub margin: f64,
    pub eps_quad: f64,
    pub description: String,
    pub trials: Vec<TrialRatio>,
}

impl ConcentrationReport {
    pub fn from_trials(p: f64, eps_quad: f64, description: impl Into<String>, trials: Vec<TrialRatio>) -> Self {
        let worst = trials.iter().min_by(|a, b| a.margin().total_cmp(&b.margin()).then(a.index.cmp(&b.index)));
        let (observed, bound) = worst.map_or((0.0, 0.0), |t| (t.observed, t.bound));
        Self { p, observed, bound, margin: bound - observed, eps_quad, description: description.into(), trials }
    }

    /// The inequality held on every trial up to the quadrature tolerance.
    pub fn holds(&self) -> bool {
        self.margin >= -self.eps_quad
    }

    pub fn violations(&self) -> usize {
        self.trials.iter().filter(|t| t.margin() < -self.eps_quad).count()
    }

    /// Combine reports; the result keeps the worst margin and the largest tolerance.
    pub fn merge(mut self, other: ConcentrationReport) -> Self {
        let offset = self.trials.len();
        self.trials.extend(other.trials.into_iter().map(|t| TrialRatio { index: t.index + offset, ..t }));
        let description =
            if other.description == self.description { self.description } else { format!("{}; {}", self.description, other.description) };
        Self::from_trials(self.p, self.eps_quad.max(other.eps_quad), description, self.trials)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn ratio_trivial_cases() {
        let v = [c(1.0), c(-1.0), Complex64::new(0.0, 1.0), c(1.0)];
        let w = [1.0; 4];
        assert_eq!(concentration_ratio(&v, &w, &[true; 4], 1.0).unwrap(), 1.0);
        assert_eq!(concentration_ratio(&v, &w, &[false; 4], 1.0).unwrap(), 0.0);
        assert!((concentration_ratio(&v, &w, &[false, true, false, false], 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((concentration_ratio(&v, &w, &[false, true, false, false], 2.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ratio_errors() {
        assert!(concentration_ratio(&[c(0.0); 3], &[1.0; 3], &[true; 3], 1.0).is_err());
        assert!(matches!(concentration_ratio(&[c(1.0); 3], &[1.0; 2], &[true; 3], 1.0), Err(Error::Shape(_))));
        assert!(concentration_ratio(&[c(1.0); 3], &[1.0; 3], &[true; 3], 0.5).is_err());
    }

    #[test]
    fn report_worst_margin_and_merge() {
        let t = |i, o, b| TrialRatio { index: i, observed: o, bound: b };
        let a = ConcentrationReport::from_trials(1.0, 1e-9, "a", vec![t(0, 0.1, 0.5), t(1, 0.4, 0.5)]);
        assert_eq!(a.observed, 0.4);
        assert!((a.margin - 0.1).abs() < 1e-15);
        let b = ConcentrationReport::from_trials(1.0, 1e-6, "b", vec![t(0, 0.6, 0.5)]);
        let m = a.merge(b);
        assert_eq!(m.trials.len(), 3);
        assert_eq!(m.trials[2].index, 2);
        assert!(!m.holds());
        assert_eq!(m.violations(), 1);
        assert_eq!(m.eps_quad, 1e-6);
    }
}
