//! Sieve constants and recovery thresholds.
//!
//! Every constant is exposed both as a bare `f64` function and, through
//! [`sieve_constant`], as a [`SieveConstant`] record carrying its parameters
//! and the computation route. Values are memoised per parameter tuple.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{
    bessel_j1, bessel_zero, composite_gauss_legendre, find_root, gauss_legendre, laguerre_eval,
    legendre_eval, legendre_largest_zero, BesselOrder, LEGENDRE_DEGREE_CAP,
};

/// Highest Hermite window order for which `C_r(R)` is offered.
pub const MAX_WINDOW_ORDER: usize = 6;

/// Value the `B_L` sequence converges to, as a published reference.
pub const B_LIMIT_REFERENCE: f64 = 3.71038068570948;
/// Published value of the root `A`.
pub const A_REFERENCE: f64 = 0.680460162465512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantName {
    #[serde(rename = "pw_bound")]
    PwBound,
    #[serde(rename = "pw_threshold")]
    PwThreshold,
    #[serde(rename = "B_L")]
    BL,
    #[serde(rename = "B_limit")]
    BLimit,
    #[serde(rename = "A")]
    ARoot,
    #[serde(rename = "l1_sphere_factor")]
    L1SphereFactor,
    #[serde(rename = "C_r")]
    CrR,
    #[serde(rename = "gabor_threshold")]
    GaborThreshold,
    #[serde(rename = "C_alpha")]
    CAlphaR,
}

impl ConstantName {
    pub const ALL: [ConstantName; 9] = [
        ConstantName::PwBound,
        ConstantName::PwThreshold,
        ConstantName::BL,
        ConstantName::BLimit,
        ConstantName::ARoot,
        ConstantName::L1SphereFactor,
        ConstantName::CrR,
        ConstantName::GaborThreshold,
        ConstantName::CAlphaR,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConstantName::PwBound => "pw_bound",
            ConstantName::PwThreshold => "pw_threshold",
            ConstantName::BL => "B_L",
            ConstantName::BLimit => "B_limit",
            ConstantName::ARoot => "A",
            ConstantName::L1SphereFactor => "l1_sphere_factor",
            ConstantName::CrR => "C_r",
            ConstantName::GaborThreshold => "gabor_threshold",
            ConstantName::CAlphaR => "C_alpha",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown constant '{s}'")))
    }
}

/// Parameters a constant may depend on. Unused entries stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstantParams {
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "W", skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveConstant {
    pub name: ConstantName,
    pub parameters: BTreeMap<&'static str, f64>,
    pub value: f64,
    pub method: &'static str,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum CacheKey {
    BL(usize),
    Cr(usize, u64),
    BLimit,
    A,
}

fn memo(key: CacheKey, compute: impl FnOnce() -> Result<f64>) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(*v);
    }
    // computed outside the lock; a racing duplicate computes the same value
    let v = compute()?;
    cache.lock().unwrap().insert(key, v);
    Ok(v)
}

/// The factor `π/2` of the Paley-Wiener large sieve.
pub fn pw_sieve_bound() -> f64 {
    PI / 2.0
}

/// Density below which the line sieve guarantees L1 recovery: `1/π`.
pub fn recovery_threshold_line() -> f64 {
    1.0 / PI
}

/// `B_L = (1 - t_{L,L}) / ∫_{t_{L,L}}^1 P_L(t)² dt`.
///
/// The integral uses an `(L+2)`-point Gauss-Legendre rule on `[t_{L,L}, 1]`,
/// exact for the degree-`2L` integrand.
pub fn compute_b_l(l: usize) -> Result<f64> {
    if l == 0 {
        return domain("B_L needs L >= 1");
    }
    if l > LEGENDRE_DEGREE_CAP {
        return Err(Error::Capacity { degree: l, cap: LEGENDRE_DEGREE_CAP });
    }
    memo(CacheKey::BL(l), || {
        let t = legendre_largest_zero(l)?;
        let rule = gauss_legendre(l + 2, t, 1.0);
        let mut integral = 0.0;
        for (x, w) in rule.iter() {
            let p = legendre_eval(l, x)?;
            integral += w * p * p;
        }
        Ok((1.0 - t) / integral)
    })
}

/// `J_1(j_{0,1})^{-2}`, the limit of `B_L`.
pub fn b_limit() -> f64 {
    memo(CacheKey::BLimit, || {
        let j = bessel_zero(BesselOrder::Zero, 1)?;
        Ok(1.0 / bessel_j1(j).powi(2))
    })
    .expect("first zero of J_0 is always found")
}

/// Left side minus right side of the equation defining `A`:
/// `j A - 2√A J_1(j√A) - (j/2 - J_1(j))` with `j = j_{0,1}`.
pub fn a_equation_residual(a: f64) -> f64 {
    let j = bessel_zero(BesselOrder::Zero, 1).expect("first zero of J_0");
    let s = a.sqrt();
    j * a - 2.0 * s * bessel_j1(j * s) - (0.5 * j - bessel_j1(j))
}

/// The unique positive root `A` of [`a_equation_residual`], bracketed in `(0.5, 0.9)`.
pub fn solve_a() -> Result<f64> {
    memo(CacheKey::A, || {
        let a = find_root(a_equation_residual, 0.5, 0.9, 0.0)?;
        if a_equation_residual(a).abs() >= 1e-11 {
            return Err(Error::Accuracy("residual of A equation too large".into()));
        }
        Ok(a)
    })
}

/// `(2A - 1)^{-1}`, the conjectured spherical L1 sieve factor.
pub fn l1_sphere_factor() -> Result<f64> {
    Ok(1.0 / (2.0 * solve_a()? - 1.0))
}

/// `C_r(R) = ∫_{D_R} |V_{h_r} h_r(w)|² dw`.
///
/// The ambiguity function of `h_r` has modulus `|L_r(π|w|²)| e^{-π|w|²/2}`, so
/// with `u = π s²` the integral becomes `∫_0^{πR²} L_r(u)² e^{-u} du`, which is
/// evaluated by composite Gauss-Legendre on panels of width ≤ 2.
pub fn compute_c_r(r: usize, radius: f64) -> Result<f64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return domain(format!("C_r(R) needs R > 0, got {radius}"));
    }
    if r > MAX_WINDOW_ORDER {
        return domain(format!("window order {r} above {MAX_WINDOW_ORDER}"));
    }
    memo(CacheKey::Cr(r, radius.to_bits()), || {
        let upper = PI * radius * radius;
        let panels = (upper / 2.0).ceil().max(1.0) as usize;
        let rule = composite_gauss_legendre(24, panels, 0.0, upper);
        Ok(rule.integrate(|u| laguerre_eval(r, u).powi(2) * (-u).exp()))
    })
}

/// Density threshold `(1 - e^{-πR²})/2` for Gaussian-window STFT recovery.
pub fn gabor_recovery_threshold(radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return domain(format!("threshold needs R > 0, got {radius}"));
    }
    Ok(0.5 * -(-PI * radius * radius).exp_m1())
}

/// `C^α(R) = (1 - (1 - R²)^{α-1}) / (α - 1)`.
pub fn compute_c_alpha(alpha: f64, radius: f64) -> Result<f64> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return domain(format!("C^alpha(R) needs alpha > 1, got {alpha}"));
    }
    if !(radius > 0.0 && radius < 1.0) {
        return domain(format!("C^alpha(R) needs 0 < R < 1, got {radius}"));
    }
    let e = alpha - 1.0;
    // 1 - (1-R²)^e computed as -expm1(e ln(1-R²)) to keep small R accurate
    Ok(-(e * (-radius * radius).ln_1p()).exp_m1() / e)
}

fn need<T>(v: Option<T>, what: &str, name: ConstantName) -> Result<T> {
    v.ok_or_else(|| Error::Domain(format!("{} requires parameter {what}", name.as_str())))
}

/// Evaluate a named constant into a self-describing record.
pub fn sieve_constant(name: ConstantName, p: &ConstantParams) -> Result<SieveConstant> {
    let mut parameters = BTreeMap::new();
    let (value, method) = match name {
        ConstantName::PwBound => (pw_sieve_bound(), "closed form pi/2"),
        ConstantName::PwThreshold => (recovery_threshold_line(), "closed form 1/pi"),
        ConstantName::BL => {
            let l = need(p.l, "L", name)?;
            parameters.insert("L", l as f64);
            (compute_b_l(l)?, "largest Legendre zero by bracketing + exact (L+2)-point Gauss-Legendre")
        }
        ConstantName::BLimit => (b_limit(), "J_1(j_{0,1})^-2 via series/Miller Bessel evaluation"),
        ConstantName::ARoot => (solve_a()?, "bracketed root on (0.5, 0.9)"),
        ConstantName::L1SphereFactor => (l1_sphere_factor()?, "(2A-1)^-1 from bracketed A"),
        ConstantName::CrR => {
            let r = need(p.r, "r", name)?;
            let radius = need(p.radius, "R", name)?;
            parameters.insert("r", r as f64);
            parameters.insert("R", radius);
            (compute_c_r(r, radius)?, "radial Gauss-Legendre of Laguerre-Gaussian ambiguity")
        }
        ConstantName::GaborThreshold => {
            let radius = need(p.radius, "R", name)?;
            parameters.insert("R", radius);
            (gabor_recovery_threshold(radius)?, "closed form (1-exp(-pi R^2))/2")
        }
        ConstantName::CAlphaR => {
            let alpha = need(p.alpha, "alpha", name)?;
            let radius = need(p.radius, "R", name)?;
            parameters.insert("alpha", alpha);
            parameters.insert("R", radius);
            (compute_c_alpha(alpha, radius)?, "closed form")
        }
    };
    Ok(SieveConstant { name, parameters, value, method })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paley_wiener_constants() {
        assert_eq!(pw_sieve_bound(), 1.5707963267948966);
        assert_eq!(recovery_threshold_line(), 0.3183098861837907);
        assert!((pw_sieve_bound() * recovery_threshold_line() - 0.5).abs() < 1e-16);
    }

    #[test]
    fn b_l_small_degrees() {
        // t_{1,1} = 0 and ∫_0^1 t² = 1/3
        assert!((compute_b_l(1).unwrap() - 3.0).abs() < 1e-13);
        // closed-form antiderivative of ((3t²-1)/2)² = (9t⁴ - 6t² + 1)/4 from 1/√3 to 1
        let t = 1.0 / 3f64.sqrt();
        let anti = |x: f64| (9.0 * x.powi(5) / 5.0 - 2.0 * x.powi(3) + x) / 4.0;
        let expected = (1.0 - t) / (anti(1.0) - anti(t));
        assert!((compute_b_l(2).unwrap() - expected).abs() < 1e-13);
        assert!((compute_b_l(2).unwrap() - 3.4356190385420365).abs() < 1e-12);
    }

    #[test]
    fn b_l_against_high_order_quadrature() {
        // oracle: 64-panel composite rule instead of the exact (L+2)-point rule
        for l in [3usize, 7, 15, 40] {
            let t = legendre_largest_zero(l).unwrap();
            let rule = composite_gauss_legendre(12, 64, t, 1.0);
            let i = rule.integrate(|x| legendre_eval(l, x).unwrap().powi(2));
            assert!(((1.0 - t) / i - compute_b_l(l).unwrap()).abs() < 1e-11, "L={l}");
        }
    }

    #[test]
    fn b_l_range_and_trend() {
        for l in 1..=200 {
            let b = compute_b_l(l).unwrap();
            assert!((3.0 - 1e-12..=3.75).contains(&b), "L={l} B={b}");
        }
        let lim = b_limit();
        let gaps: Vec<f64> = [10, 20, 50, 100, 200].iter().map(|&l| (compute_b_l(l).unwrap() - lim).abs()).collect();
        assert!(gaps.windows(2).all(|g| g[1] <= g[0]));
        assert!(gaps[4] < 0.05);
        assert!(compute_b_l(0).is_err());
    }

    #[test]
    fn b_limit_value() {
        let j = bessel_zero(BesselOrder::Zero, 1).unwrap();
        assert!((bessel_j1(j) - 0.5191474972894669).abs() < 1e-15);
        assert!((b_limit() - B_LIMIT_REFERENCE).abs() < 1e-10);
        assert_eq!(b_limit(), 1.0 / bessel_j1(j).powi(2));
    }

    #[test]
    fn a_root() {
        let a = solve_a().unwrap();
        assert!((a - A_REFERENCE).abs() < 1e-9);
        assert!(a_equation_residual(a).abs() < 1e-11);
        assert!(a_equation_residual(A_REFERENCE).abs() < 1e-10);
        // mpmath: (2A-1)^-1 = 2.770694612976189903...
        assert!((l1_sphere_factor().unwrap() - 2.7706946129761899).abs() < 1e-9);
    }

    #[test]
    fn a_equation_has_single_sign_change() {
        let vals: Vec<f64> = (0..1000).map(|i| a_equation_residual(0.01 + 1.49 * i as f64 / 999.0)).collect();
        assert_eq!(vals.windows(2).filter(|p| p[0] * p[1] < 0.0).count(), 1);
    }

    #[test]
    fn c_r_gaussian_window() {
        for radius in [0.25, 0.5, 1.0, 2.0] {
            let closed = -(-PI * radius * radius).exp_m1();
            assert!((compute_c_r(0, radius).unwrap() - closed).abs() < 1e-8);
        }
        assert!((compute_c_r(0, 0.5).unwrap() - 0.544061872234003763).abs() < 1e-14);
        assert!((compute_c_r(0, 10.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(compute_c_r(0, 0.0).is_err());
        assert!(compute_c_r(0, -1.0).is_err());
        assert!(compute_c_r(7, 1.0).is_err());
    }

    /// Adaptive Simpson on the radial form in `s`, independent of the `u`
    /// substitution used by the implementation.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40)
    }

    #[test]
    fn c_r_first_hermite_against_adaptive_oracle() {
        let f = |s: f64| {
            let u = PI * s * s;
            (1.0 - u).powi(2) * (-u).exp() * 2.0 * PI * s
        };
        let oracle = adaptive_simpson(&f, 0.0, 1.0, 1e-13);
        assert!((compute_c_r(1, 1.0).unwrap() - oracle).abs() < 1e-10);
        // mpmath reference
        assert!((compute_c_r(1, 1.0).unwrap() - 0.530281803851785339).abs() < 1e-13);
        assert!((compute_c_r(2, 1.0).unwrap() - 0.391323107570794023).abs() < 1e-13);
    }

    #[test]
    fn c_r_increases_with_radius() {
        for r in 0..=3 {
            let vals: Vec<f64> = (1..=40).map(|i| compute_c_r(r, 0.05 * i as f64).unwrap()).collect();
            assert!(vals.windows(2).all(|p| p[1] > p[0]), "r={r}");
            assert!(vals.iter().all(|&v| v > 0.0 && v < 1.0 + 1e-12));
        }
    }

    #[test]
    fn gabor_threshold() {
        assert!((gabor_recovery_threshold(1.0).unwrap() - 0.478393040868113875).abs() < 1e-15);
        assert!(gabor_recovery_threshold(1e-6).unwrap() < 1e-11);
        assert!((gabor_recovery_threshold(10.0).unwrap() - 0.5).abs() < 1e-15);
        let v: Vec<f64> = (1..50).map(|i| gabor_recovery_threshold(0.05 * i as f64).unwrap()).collect();
        assert!(v.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn c_alpha_closed_form() {
        assert!((compute_c_alpha(2.0, 0.5).unwrap() - 0.25).abs() < 1e-16);
        assert!((compute_c_alpha(3.0, 0.5).unwrap() - 0.21875).abs() < 1e-16);
        for i in 1..=9 {
            let r = 0.1 * i as f64;
            assert!((compute_c_alpha(2.0, r).unwrap() - r * r).abs() < 1e-15);
        }
        assert!(compute_c_alpha(2.5, 1e-8).unwrap() < 1e-15);
        assert!(compute_c_alpha(1.0, 0.5).is_err());
        assert!(compute_c_alpha(2.0, 1.0).is_err());
        assert!(compute_c_alpha(2.0, 0.0).is_err());
    }

    #[test]
    fn named_constant_records() {
        let c = sieve_constant(ConstantName::CAlphaR, &ConstantParams { alpha: Some(2.0), radius: Some(0.5), ..Default::default() }).unwrap();
        assert!((c.value - 0.25).abs() < 1e-15);
        assert_eq!(c.parameters["alpha"], 2.0);
        assert!(sieve_constant(ConstantName::BL, &ConstantParams::default()).is_err());
        for name in ConstantName::ALL {
            assert_eq!(ConstantName::parse(name.as_str()).unwrap(), name);
        }
        let p = ConstantParams { l: Some(5), r: Some(1), radius: Some(0.7), alpha: Some(2.5), bandwidth: None };
        for name in ConstantName::ALL {
            assert!(sieve_constant(name, &p).unwrap().value > 0.0);
        }
    }
}
