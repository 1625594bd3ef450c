use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::roots::find_root;

/// Largest Legendre degree accepted by the recurrences in this module.
pub const LEGENDRE_DEGREE_CAP: usize = 512;

fn check_cap(degree: usize, cap: usize) -> Result<()> {
    if degree > cap {
        Err(Error::Capacity { degree, cap })
    } else {
        Ok(())
    }
}

/// `(P_l(t), P_{l-1}(t))` by the three-term recurrence. `P_{-1}` is taken as 0.
pub(crate) fn legendre_pair(l: usize, t: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..l {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Legendre polynomial `P_l(t)`.
pub fn legendre_eval(l: usize, t: f64) -> Result<f64> {
    check_cap(l, LEGENDRE_DEGREE_CAP)?;
    Ok(legendre_pair(l, t).0)
}

/// `P_l'(t)` for `|t| < 1`.
pub(crate) fn legendre_derivative(l: usize, t: f64) -> f64 {
    if l == 0 {
        return 0.0;
    }
    let (p, q) = legendre_pair(l, t);
    l as f64 * (q - t * p) / (1.0 - t * t)
}

/// Largest zero `t_{L,L}` of `P_L`.
///
/// The angle of the largest zero lies in `(π/(2L+1), 2π/(2L+1))`, which gives a
/// bracket that never contains a second zero.
pub fn legendre_largest_zero(l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::Domain("P_0 has no zeros".into()));
    }
    check_cap(l, LEGENDRE_DEGREE_CAP)?;
    let n = 2.0 * l as f64 + 1.0;
    let lo = (2.0 * PI / n).cos();
    let hi = (PI / n).cos();
    find_root(|t| legendre_pair(l, t).0, lo, hi, 0.0)
}

/// Orthonormalised associated Legendre functions
/// `N_l^m P_l^m(x)` with `N_l^m = sqrt((2l+1)/(4π) (l-m)!/(l+m)!)`, Condon-Shortley
/// phase included, so that `Y_l^m(θ, φ) = table[l][m] e^{imφ}` for `m ≥ 0`.
///
/// Row `l` holds entries for `m = 0..=l`.
pub fn normalized_associated_legendre(lmax: usize, x: f64) -> Result<Vec<Vec<f64>>> {
    check_cap(lmax, LEGENDRE_DEGREE_CAP)?;
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut table: Vec<Vec<f64>> = (0..=lmax).map(|l| vec![0.0; l + 1]).collect();
    let mut pmm = (0.25 / PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        table[m][m] = pmm;
        if m + 1 > lmax {
            break;
        }
        let mf = m as f64;
        table[m + 1][m] = (2.0 * mf + 3.0).sqrt() * x * pmm;
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            table[l][m] = a * (x * table[l - 1][m] - b * table[l - 2][m]);
        }
    }
    Ok(table)
}

/// Laguerre polynomial `L_n(x)`.
pub fn laguerre_eval(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolynomialKind {
    Legendre,
    /// Orthonormalised on the sphere, fixed order `m`.
    AssociatedLegendre(usize),
    Laguerre,
}

/// A recurrence-evaluated orthogonal family with a degree cap.
#[derive(Debug, Clone, Copy)]
pub struct OrthogonalPolynomialFamily {
    pub kind: PolynomialKind,
    pub degree_cap: usize,
}

impl OrthogonalPolynomialFamily {
    pub fn new(kind: PolynomialKind) -> Self {
        Self { kind, degree_cap: LEGENDRE_DEGREE_CAP }
    }

    pub fn eval(&self, degree: usize, t: f64) -> Result<f64> {
        check_cap(degree, self.degree_cap)?;
        Ok(match self.kind {
            PolynomialKind::Legendre => legendre_pair(degree, t).0,
            PolynomialKind::Laguerre => laguerre_eval(degree, t),
            PolynomialKind::AssociatedLegendre(m) => {
                if degree < m {
                    0.0
                } else {
                    normalized_associated_legendre(degree, t)?[degree][m]
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_values() {
        assert_eq!(legendre_eval(0, 0.3).unwrap(), 1.0);
        assert_eq!(legendre_eval(1, 0.7).unwrap(), 0.7);
        assert!((legendre_eval(2, 0.5).unwrap() + 0.125).abs() < 1e-16);
    }

    #[test]
    fn recurrence_matches_closed_forms() {
        let mut worst = 0.0f64;
        for i in 0..100 {
            let t = -1.0 + 2.0 * i as f64 / 99.0;
            let closed = [1.0, t, 0.5 * (3.0 * t * t - 1.0), 0.5 * (5.0 * t * t * t - 3.0 * t)];
            for (l, c) in closed.iter().enumerate() {
                worst = worst.max((legendre_eval(l, t).unwrap() - c).abs());
            }
        }
        assert!(worst < 1e-13, "{worst}");
    }

    #[test]
    fn degree_over_cap_is_rejected() {
        assert_eq!(
            legendre_eval(513, 0.1).unwrap_err(),
            Error::Capacity { degree: 513, cap: 512 }
        );
        assert!(legendre_largest_zero(600).is_err());
    }

    #[test]
    fn largest_zeros() {
        assert_eq!(legendre_largest_zero(1).unwrap(), 0.0);
        assert!((legendre_largest_zero(2).unwrap() - 0.5773502691896258).abs() < 1e-15);
        assert!((legendre_largest_zero(5).unwrap() - 0.906179845938664).abs() < 1e-14);
    }

    #[test]
    fn largest_zero_l5_against_bisection_oracle() {
        // sign-change scan of P_5 over (0.9, 0.92) then plain bisection
        let p5 = |t: f64| legendre_eval(5, t).unwrap();
        let (mut a, mut b) = (0.9, 0.92);
        assert!(p5(a) * p5(b) < 0.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if p5(a) * p5(m) <= 0.0 {
                b = m
            } else {
                a = m
            }
        }
        assert!((legendre_largest_zero(5).unwrap() - a).abs() < 1e-15);
    }

    #[test]
    fn largest_zero_residual_and_monotonicity() {
        let mut last = -1.0;
        for l in 1..=64 {
            let t = legendre_largest_zero(l).unwrap();
            assert!(legendre_eval(l, t).unwrap().abs() < 1e-13, "L={l}");
            assert!(t > last);
            last = t;
        }
        let mut last = 0.0;
        for l in (64..=512).step_by(32) {
            let t = legendre_largest_zero(l).unwrap();
            assert!(t > last && t < 1.0);
            last = t;
        }
    }

    #[test]
    fn laguerre_closed_forms() {
        for i in 0..50 {
            let x = i as f64 * 0.2;
            assert_eq!(laguerre_eval(0, x), 1.0);
            assert!((laguerre_eval(1, x) - (1.0 - x)).abs() < 1e-14);
            assert!((laguerre_eval(2, x) - (1.0 - 2.0 * x + 0.5 * x * x)).abs() < 1e-12);
        }
    }

    #[test]
    fn associated_legendre_matches_closed_forms() {
        let x: f64 = 0.37;
        let s = (1.0 - x * x).sqrt();
        let t = normalized_associated_legendre(2, x).unwrap();
        let c = |v: f64| v / (4.0 * PI).sqrt();
        assert!((t[0][0] - c(1.0)).abs() < 1e-15);
        assert!((t[1][0] - c(3f64.sqrt() * x)).abs() < 1e-15);
        // Y_1^1 = -sqrt(3/(8π)) sinθ e^{iφ}
        assert!((t[1][1] + (3.0 / (8.0 * PI)).sqrt() * s).abs() < 1e-15);
        assert!((t[2][0] - c(5f64.sqrt() * 0.5 * (3.0 * x * x - 1.0))).abs() < 1e-15);
        let fam = OrthogonalPolynomialFamily::new(PolynomialKind::AssociatedLegendre(1));
        assert!((fam.eval(2, x).unwrap() - t[2][1]).abs() < 1e-16);
        assert_eq!(fam.eval(0, x).unwrap(), 0.0);
    }
}
