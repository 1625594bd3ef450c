use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::regions::PeriodicMeasure;
use crate::specfun::composite_gauss_legendre;
use crate::{complex_normal, trial_rng};

use super::{ConcentrationReport, TrialRatio};

/// `f(α) = Σ_{k=m+1}^{m+n} a_k e^{2πikα}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub offset: i64,
    pub coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    pub fn eval(&self, alpha: f64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| a * Complex64::from_polar(1.0, 2.0 * PI * (self.offset + 1 + j as i64) as f64 * alpha))
            .sum()
    }

    /// `‖f‖²_{L²(0,1)} = Σ |a_k|²`.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `∫ |f|² dμ`; density pieces use Gauss-Legendre panels short enough to
    /// integrate `|f|²`, a trigonometric polynomial of degree `n - 1`, to round-off.
    pub fn measure_norm_sq(&self, mu: &PeriodicMeasure) -> f64 {
        let points: f64 = mu.points.iter().map(|&(x, m)| m * self.eval(x).norm_sqr()).sum();
        let dens: f64 = mu
            .density
            .iter()
            .map(|&(a, b, h)| {
                let panels = ((b - a) * self.coeffs.len() as f64).ceil().max(1.0) as usize;
                h * composite_gauss_legendre(16, panels, a, b).integrate(|t| self.eval(t).norm_sqr())
            })
            .sum();
        points + dens
    }
}

/// Checks `‖f‖²_{L²(μ)} ≤ (n + 2/δ) sup_α μ([α, α+δ]) ‖f‖²_{L²(0,1)}` for
/// `trials` random polynomials with `n` consecutive frequencies (random
/// offset, complex Gaussian coefficients). Observed is `‖f‖²_μ / ‖f‖²`.
pub fn verify_bombieri(n: usize, delta: f64, mu: &PeriodicMeasure, trials: usize, seed: u64) -> Result<ConcentrationReport> {
    if n == 0 {
        return domain("need at least one frequency");
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return domain(format!("window length delta must lie in (0, 1], got {delta}"));
    }
    mu.validate()?;
    let window = mu.max_window_mass(delta);
    let bound = (n as f64 + 2.0 / delta) * window;
    let ratios: Vec<TrialRatio> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let f = TrigPolynomial {
                offset: rng.random_range(-32..=32),
                coeffs: (0..n).map(|_| complex_normal(&mut rng)).collect(),
            };
            TrialRatio { index: i, observed: f.measure_norm_sq(mu) / f.norm_sq(), bound }
        })
        .collect();
    Ok(ConcentrationReport::from_trials(
        2.0,
        1e-12 * (1.0 + bound),
        format!("Bombieri n={n} delta={delta} window mass={window}"),
        ratios,
    ))
}

/// `count` point masses at uniform positions with uniform masses in `(0, 1]`.
pub fn random_point_measure<R: Rng + ?Sized>(rng: &mut R, count: usize) -> PeriodicMeasure {
    PeriodicMeasure {
        points: (0..count).map(|_| (rng.random_range(0.0..1.0), 1.0 - rng.random_range(0.0..1.0))).collect(),
        density: Vec::new(),
    }
}
