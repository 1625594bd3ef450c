use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::compute_c_r;
use crate::error::{domain, Error, Result};
use crate::regions::{rho_plane, PlanarRegion, PlaneDensityOptions};
use crate::specfun::{composite_gauss_legendre, gauss_legendre, hermite_functions};

use super::{ConcentrationReport, Geometry, PhaseSpaceField, TrialRatio};

const MAX_EXPANSION_ORDER: usize = 8;
const MAX_WINDOW: usize = 6;
/// Half-width of the time integration range around the integrand's centre.
const TIME_HALF_WIDTH: f64 = 6.0;
/// Panel width for the composite rule in time; 16 nodes per panel keep the
/// oscillating factor resolved to round-off for frequencies up to about 8.
const PANEL: f64 = 0.25;

/// `f = Σ_k c_k h_k`, a finite Hermite expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteExpansion {
    pub coeffs: Vec<Complex64>,
}

impl HermiteExpansion {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_EXPANSION_ORDER + 1 {
            return domain(format!("Hermite expansion order must be 0..={MAX_EXPANSION_ORDER}"));
        }
        Ok(Self { coeffs })
    }

    /// The single Hermite function `h_k`.
    pub fn basis(k: usize) -> Result<Self> {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        hermite_functions(self.order(), t).iter().zip(&self.coeffs).map(|(h, c)| c * h).sum()
    }

    /// `‖f‖₂`, by orthonormality of the Hermite functions.
    pub fn norm2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Composite Gauss-Legendre rule in time, centred at `center`.
#[derive(Debug, Clone)]
pub struct StftQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl StftQuadrature {
    pub fn centered(center: f64) -> Self {
        let panels = (2.0 * TIME_HALF_WIDTH / PANEL).round() as usize;
        let rule = composite_gauss_legendre(16, panels, center - TIME_HALF_WIDTH, center + TIME_HALF_WIDTH);
        Self { nodes: rule.nodes, weights: rule.weights }
    }
}

impl Default for StftQuadrature {
    fn default() -> Self {
        Self::centered(0.0)
    }
}

fn check_window(r: usize) -> Result<()> {
    if r > MAX_WINDOW {
        return domain(format!("window order {r} exceeds {MAX_WINDOW}"));
    }
    Ok(())
}

/// `V_{h_r} f(x, ω) = ∫ f(t) e^{-2πiωt} h_r(t - x) dt` at a single point `z = x + iω`.
pub fn stft_hermite_at(f: &HermiteExpansion, r: usize, z: Complex64, quad: &StftQuadrature) -> Complex64 {
    quad.nodes
        .iter()
        .zip(&quad.weights)
        .map(|(&t, &w)| f.eval(t) * hermite_functions(r, t - z.re)[r] * Complex64::from_polar(w, -2.0 * PI * z.im * t))
        .sum()
}

/// `⟨π(w) h_r, π(z) h_r⟩ = ∫ e^{2πi(ω_w - ω_z)t} h_r(t - x_w) h_r(t - x_z) dt`.
pub fn time_frequency_kernel(r: usize, w: Complex64, z: Complex64) -> Complex64 {
    let quad = StftQuadrature::centered(0.5 * (w.re + z.re));
    quad.nodes
        .iter()
        .zip(&quad.weights)
        .map(|(&t, &q)| {
            let a = hermite_functions(r, t - w.re)[r] * hermite_functions(r, t - z.re)[r];
            Complex64::from_polar(q * a, 2.0 * PI * (w.im - z.im) * t)
        })
        .sum()
}

/// Cell-centred square grid `[-a, a]²` in the time-frequency plane; the point
/// `x + iω` is stored as a complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneGrid {
    pub half_width: f64,
    pub step: f64,
}

impl Default for PlaneGrid {
    fn default() -> Self {
        Self { half_width: 5.0, step: 0.05 }
    }
}

impl PlaneGrid {
    pub fn len(&self) -> usize {
        (2.0 * self.half_width / self.step).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.step
    }

    /// Points ordered with the frequency index fastest.
    pub fn points(&self) -> Vec<Complex64> {
        let n = self.len();
        (0..n).flat_map(|i| (0..n).map(move |j| Complex64::new(self.coord(i), self.coord(j)))).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.half_width > self.step) || !self.half_width.is_finite() {
            return domain("plane grid needs 0 < step < half_width");
        }
        Ok(())
    }
}

/// Relative size allowed for `|V f|` on the outermost ring of grid cells.
const DECAY_TOL: f64 = 1e-8;

/// Samples `V_{h_r} f` on the grid by quadrature of the defining integral.
pub fn stft_hermite(f: &HermiteExpansion, r: usize, grid: &PlaneGrid) -> Result<PhaseSpaceField> {
    check_window(r)?;
    if f.order() > MAX_EXPANSION_ORDER {
        return domain(format!("Hermite expansion order must be 0..={MAX_EXPANSION_ORDER}"));
    }
    grid.validate()?;
    let quad = StftQuadrature::default();
    let n = grid.len();
    let ft: Vec<Complex64> = quad.nodes.iter().zip(&quad.weights).map(|(&t, &w)| f.eval(t) * w).collect();
    let freqs: Vec<Vec<Complex64>> = (0..n)
        .map(|j| quad.nodes.iter().map(|&t| Complex64::from_polar(1.0, -2.0 * PI * grid.coord(j) * t)).collect())
        .collect();
    let values: Vec<Complex64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = grid.coord(i);
            let g: Vec<Complex64> =
                quad.nodes.iter().zip(&ft).map(|(&t, fw)| fw * hermite_functions(r, t - x)[r]).collect();
            let freqs = &freqs;
            (0..n).map(move |j| g.iter().zip(&freqs[j]).map(|(a, e)| a * e).sum::<Complex64>())
        })
        .collect();
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = (0..n)
        .flat_map(|i| [(i, 0), (i, n - 1), (0, i), (n - 1, i)])
        .map(|(i, j)| values[i * n + j].norm())
        .fold(0.0, f64::max);
    if edge > DECAY_TOL * peak {
        return domain(format!("grid too small: boundary magnitude {edge:.3e} vs peak {peak:.3e}"));
    }
    Ok(PhaseSpaceField {
        geometry: Geometry::Plane,
        points: grid.points(),
        weights: vec![grid.step * grid.step; n * n],
        values,
    })
}

/// Fraction of the cell around `c` lying in `Ω`, from a `16 × 16` sub-lattice;
/// cells whose 3 × 3 probe is uniform count as fully in or out.
fn cell_coverage(omega: &PlanarRegion, c: Complex64, h: f64) -> (f64, bool) {
    let probe = |u: f64, v: f64| omega.contains([c.re + u * h, c.im + v * h]);
    let offs = [-0.5, 0.0, 0.5];
    let first = probe(0.0, 0.0);
    let uniform = offs.iter().all(|&u| offs.iter().all(|&v| probe(u, v) == first));
    if uniform {
        return (if first { 1.0 } else { 0.0 }, false);
    }
    let k = 16;
    let mut hits = 0;
    for a in 0..k {
        for b in 0..k {
            let u = (a as f64 + 0.5) / k as f64 - 0.5;
            let v = (b as f64 + 0.5) / k as f64 - 0.5;
            hits += probe(u, v) as usize;
        }
    }
    (hits as f64 / (k * k) as f64, true)
}

/// Checks `‖V_{h_r} f χ_Ω‖₁ ≤ ρ_{ℝ²}(Ω, R) / C_r(R) · ‖V_{h_r} f‖₁` for every
/// member of `corpus`, using the conservative density.
///
/// Cells cut by `∂Ω` are weighted by their covered fraction. The declared
/// quadrature tolerance is the relative mass of those cells, an upper bound
/// for the indicator error, plus the grid Parseval defect.
pub fn verify_gabor_sieve(
    r: usize,
    radius: f64,
    omega: &PlanarRegion,
    corpus: &[HermiteExpansion],
    grid: &PlaneGrid,
) -> Result<ConcentrationReport> {
    check_window(r)?;
    let rho = rho_plane(omega, radius, &PlaneDensityOptions::default())?;
    let bound = rho.conservative() / compute_c_r(r, radius)?;
    let pts = grid.points();
    let cover: Vec<(f64, bool)> = pts.par_iter().map(|&c| cell_coverage(omega, c, grid.step)).collect();
    let outcomes: Vec<(TrialRatio, f64)> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let field = stft_hermite(f, r, grid)?;
            let (mut inside, mut edge, mut total, mut energy) = (0.0, 0.0, 0.0, 0.0);
            for ((v, w), &(frac, cut)) in field.values.iter().zip(&field.weights).zip(&cover) {
                let a = v.norm() * w;
                total += a;
                energy += v.norm_sqr() * w;
                inside += frac * a;
                if cut {
                    edge += a;
                }
            }
            if !(total > 0.0) {
                return domain("zero function in corpus");
            }
            let parseval = (energy.sqrt() / f.norm2() - 1.0).abs();
            Ok((TrialRatio { index: i, observed: inside / total, bound }, edge / total + parseval))
        })
        .collect::<Result<_>>()?;
    let eps = outcomes.iter().map(|o| o.1).fold(0.0, f64::max);
    Ok(ConcentrationReport::from_trials(
        1.0,
        eps,
        format!("Gabor r={r} R={radius} rho={} corpus={}", rho.value, corpus.len()),
        outcomes.into_iter().map(|o| o.0).collect(),
    ))
}

/// Largest discrepancy in the local reproducing identity
/// `V f(z) = C_r(R)^{-1} ∫_{z + D_R} V f(w) ⟨π(w)h_r, π(z)h_r⟩ dw`
/// over `points`, relative to the largest `|V f(z)|` among them.
///
/// The disc is integrated in polar coordinates: Gauss-Legendre of order
/// `order` in the radius and a `2·order`-point trapezoid in the angle.
pub fn verify_local_reproducing_plane(
    r: usize,
    radius: f64,
    points: &[Complex64],
    f: &HermiteExpansion,
    order: usize,
) -> Result<f64> {
    if r > 3 {
        return domain(format!("window order {r} exceeds 3"));
    }
    if points.is_empty() || order == 0 {
        return domain("need test points and a positive quadrature order");
    }
    let c = compute_c_r(r, radius)?;
    let quad = StftQuadrature::default();
    let radial = gauss_legendre(order, 0.0, radius);
    let na = 2 * order;
    let errs: Vec<(f64, f64)> = points
        .par_iter()
        .map(|&z| {
            let lhs = stft_hermite_at(f, r, z, &quad);
            let mut acc = Complex64::new(0.0, 0.0);
            for (rho, wr) in radial.iter() {
                for k in 0..na {
                    let w = z + Complex64::from_polar(rho, 2.0 * PI * k as f64 / na as f64);
                    acc += stft_hermite_at(f, r, w, &quad) * time_frequency_kernel(r, w, z) * (wr * rho);
                }
            }
            let rhs = acc * (2.0 * PI / na as f64) / c;
            ((lhs - rhs).norm(), lhs.norm())
        })
        .collect();
    let scale = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    let worst = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    if !worst.is_finite() || !(scale > 0.0) {
        return Err(Error::Accuracy("local reproducing quadrature produced no usable values".into()));
    }
    Ok(worst / scale)
}
