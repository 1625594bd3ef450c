use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::compute_c_alpha;
use crate::error::{domain, Error, Result};
use crate::regions::{pseudo_ball_euclidean, rho_hyperbolic, DiscGrid, DiscRegion};
use crate::specfun::gauss_legendre;

use super::{ConcentrationReport, Geometry, PhaseSpaceField, TrialRatio};

const MAX_DEGREE: usize = 50;

/// `F(z) = Σ_k a_k z^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_DEGREE + 1 {
            return domain(format!("polynomial degree must be 0..={MAX_DEGREE}"));
        }
        Ok(Self { coeffs })
    }

    pub fn monomial(k: usize) -> Result<Self> {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return domain(format!("weight exponent alpha must exceed 1, got {alpha}"));
    }
    Ok(())
}

/// `𝒦^α(z, w) = (1 - z w̄)^{-α}`, principal branch.
pub fn bergman_kernel(alpha: f64, z: Complex64, w: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - z * w.conj()).powf(-alpha)
}

/// `‖F‖²` in `A²_α`, from `‖z^k‖² = B(k + 1, α - 1)`.
pub fn bergman_norm_sq_exact(f: &Polynomial, alpha: f64) -> f64 {
    let mut beta = 1.0 / (alpha - 1.0);
    let mut s = 0.0;
    for (k, c) in f.coeffs.iter().enumerate() {
        if k > 0 {
            beta *= k as f64 / (k as f64 + alpha - 1.0);
        }
        s += c.norm_sqr() * beta;
    }
    s
}

/// Samples `F` on every grid cell inside the disc with the weight
/// `h² (1 - |z|²)^{α-2} / π`.
pub fn bergman_field(f: &Polynomial, alpha: f64, grid: &DiscGrid) -> Result<PhaseSpaceField> {
    check_alpha(alpha)?;
    let h2 = grid.cell * grid.cell;
    let (mut points, mut weights) = (Vec::new(), Vec::new());
    for (_, _, z) in grid.cells() {
        points.push(z);
        weights.push(h2 * (1.0 - z.norm_sqr()).powf(alpha - 2.0) / PI);
    }
    let values = points.par_iter().map(|&z| f.eval(z)).collect();
    Ok(PhaseSpaceField { geometry: Geometry::Disc, points, weights, values })
}

/// Checks `‖F χ_Ω‖ ≤ 2 ρ_𝔻(Ω, R) / C^α(R) · ‖F‖` in `A¹_α` for each polynomial,
/// with the field sampled on the region's own lattice. The quadrature
/// tolerance is the relative defect of the grid `A²_α` norm against its closed
/// form, worst over the corpus.
pub fn verify_bergman_sieve(alpha: f64, radius: f64, omega: &DiscRegion, corpus: &[Polynomial]) -> Result<ConcentrationReport> {
    check_alpha(alpha)?;
    let rho = rho_hyperbolic(omega, radius)?;
    let bound = 2.0 * rho.conservative() / compute_c_alpha(alpha, radius)?;
    let mask: Vec<bool> = omega.grid.cells().map(|(i, j, _)| omega.contains_cell(i, j)).collect();
    let outcomes: Vec<(TrialRatio, f64)> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let field = bergman_field(f, alpha, &omega.grid)?;
            let exact = bergman_norm_sq_exact(f, alpha);
            let defect = (field.norm_p(2.0) - exact).abs() / exact;
            Ok((TrialRatio { index: i, observed: field.ratio(&mask, 1.0)?, bound }, defect))
        })
        .collect::<Result<_>>()?;
    let eps = outcomes.iter().map(|o| o.1).fold(0.0, f64::max);
    Ok(ConcentrationReport::from_trials(
        1.0,
        eps,
        format!("Bergman alpha={alpha} R={radius} rho={} corpus={}", rho.value, corpus.len()),
        outcomes.into_iter().map(|o| o.0).collect(),
    ))
}

/// Right-hand side of the local reproducing identity at `z`.
fn local_disc_integral(alpha: f64, radius: f64, c: f64, z: Complex64, f: &Polynomial, order: usize) -> Complex64 {
    let na = 2 * order;
    let (centre, s) = pseudo_ball_euclidean(z, radius);
    let radial = gauss_legendre(order, 0.0, s);
    let mut acc = Complex64::new(0.0, 0.0);
    for (rho, wr) in radial.iter() {
        for k in 0..na {
            let w = centre + Complex64::from_polar(rho, 2.0 * PI * k as f64 / na as f64);
            let weight = (1.0 - w.norm_sqr()).powf(alpha - 2.0) * wr * rho;
            acc += f.eval(w) * bergman_kernel(alpha, z, w) * weight;
        }
    }
    acc * (2.0 * PI / na as f64) / (PI * c)
}

/// Largest discrepancy, relative to the largest `|F(z)|` over `points`, in
/// `F(z) = C^α(R)^{-1} π^{-1} ∫_{B(z,R)} F(w) 𝒦^α(z, w) (1 - |w|²)^{α-2} dw`.
///
/// The pseudohyperbolic ball is the Euclidean disc from
/// [`pseudo_ball_euclidean`], integrated in polar coordinates around its
/// centre with Gauss-Legendre of order `order` in the radius and a
/// `2·order`-point trapezoid in the angle.
pub fn verify_local_reproducing_disc(
    alpha: f64,
    radius: f64,
    points: &[Complex64],
    f: &Polynomial,
    order: usize,
) -> Result<f64> {
    check_alpha(alpha)?;
    let c = compute_c_alpha(alpha, radius)?;
    if points.is_empty() || order == 0 {
        return domain("need test points and a positive quadrature order");
    }
    if let Some(z) = points.iter().find(|z| z.norm() >= 1.0) {
        return domain(format!("test point {z} outside the disc"));
    }
    let errs: Vec<(f64, f64)> = points
        .par_iter()
        .map(|&z| {
            let lhs = f.eval(z);
            ((lhs - local_disc_integral(alpha, radius, c, z, f, order)).norm(), lhs.norm())
        })
        .collect();
    let scale = errs.iter().map(|e| e.1).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let worst = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    if !worst.is_finite() {
        return Err(Error::Accuracy("local reproducing quadrature produced non-finite values".into()));
    }
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::{PseudoBall, DEFAULT_R_MAX};

    fn one() -> Polynomial {
        Polynomial::monomial(0).unwrap()
    }

    #[test]
    fn kernel_at_origin_is_one() {
        for &z in &[Complex64::new(0.5, 0.2), Complex64::new(-0.9, 0.0)] {
            assert_eq!(bergman_kernel(2.5, z, Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn constant_and_identity_norms() {
        let grid = DiscGrid::new(0.004).unwrap();
        let f1 = bergman_field(&one(), 2.0, &grid).unwrap();
        assert!((f1.norm_p(1.0) - 1.0).abs() < 1e-3);
        // (1/π)∫|z| dz = 2∫_0^1 s² ds
        let fz = bergman_field(&Polynomial::monomial(1).unwrap(), 2.0, &grid).unwrap();
        assert!((fz.norm_p(1.0) - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn exact_l2_norm_against_radial_quadrature() {
        // ‖z^k‖² = ∫_0^1 u^k (1-u)^{α-2} du
        for &alpha in &[2.0, 3.0, 4.5] {
            for k in [0usize, 1, 5] {
                let rule = gauss_legendre(40, 0.0, 1.0);
                let q = rule.integrate(|u| u.powi(k as i32) * (1.0 - u).powf(alpha - 2.0));
                let e = bergman_norm_sq_exact(&Polynomial::monomial(k).unwrap(), alpha);
                assert!((q - e).abs() < 1e-12, "alpha={alpha} k={k}");
            }
        }
    }

    #[test]
    fn local_formula_trivial_cases() {
        let z0 = [Complex64::new(0.0, 0.0)];
        let e = verify_local_reproducing_disc(2.0, 0.5, &z0, &one(), 8).unwrap();
        assert!(e < 1e-6, "{e}");
        // F(w) = w at z = 0: odd symmetry gives 0 = F(0)
        let p = Polynomial::monomial(1).unwrap();
        let v = local_disc_integral(2.0, 0.5, 0.25, z0[0], &p, 8);
        assert!(v.norm() < 1e-6);
    }

    #[test]
    fn local_formula_refines() {
        let p = Polynomial::new(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-1.0, 0.5),
            Complex64::new(0.0, 0.7),
            Complex64::new(0.4, 0.0),
            Complex64::new(0.2, -0.2),
        ])
        .unwrap();
        let pts = [Complex64::new(0.3, 0.4), Complex64::new(-0.7, 0.1), Complex64::new(0.05, -0.85)];
        for alpha in [2.0, 3.0] {
            let errs: Vec<f64> =
                [2, 4, 8].iter().map(|&n| verify_local_reproducing_disc(alpha, 0.5, &pts, &p, n).unwrap()).collect();
            assert!(errs[2] < 1e-4, "{errs:?}");
            assert!(errs[1] <= errs[0] && errs[2] <= errs[1].max(1e-13), "{errs:?}");
        }
    }

    #[test]
    fn sieve_constant_on_centred_ball() {
        let omega = DiscRegion::from_balls(0.004, DEFAULT_R_MAX, &[PseudoBall { center: [0.0, 0.0], radius: 0.3 }]).unwrap();
        let rep = verify_bergman_sieve(2.0, 0.5, &omega, &[one()]).unwrap();
        // F ≡ 1, α = 2: ‖χ_Ω‖ = R_Ω² (area/π), ‖1‖ = 1
        assert!((rep.observed - 0.09).abs() < 2e-3, "{}", rep.observed);
        assert!(rep.holds());
        let empty = verify_bergman_sieve(2.0, 0.5, &DiscRegion::empty(0.01, DEFAULT_R_MAX).unwrap(), &[one()]).unwrap();
        assert_eq!(empty.observed, 0.0);
        assert!(empty.holds());
    }
}
