use crate::error::{Error, Result};

const MAX_ITER: usize = 1000;

/// Bracketing root finder: Illinois-modified regula falsi with a forced
/// bisection every third step. The bracket always contains a sign change,
/// and iteration stops once its width is at most `tol` (use `0.0` to run
/// down to adjacent floats).
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa0 = f(a);
    let fb0 = f(b);
    if fa0 == 0.0 {
        return Ok(a);
    }
    if fb0 == 0.0 {
        return Ok(b);
    }
    if !(fa0 * fb0 < 0.0) {
        return Err(Error::Bracketing { lo, hi });
    }
    // true values for the final pick, scaled copies for the Illinois weights
    let (mut fa, mut fb) = (fa0, fb0);
    let (mut sa, mut sb) = (fa0, fb0);
    let mut side = 0i8;

    for iter in 0..MAX_ITER {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let mut x = if iter % 3 == 2 {
            mid
        } else {
            (a * sb - b * sa) / (sb - sa)
        };
        if !(x > a && x < b) {
            x = mid;
        }
        if x <= a || x >= b {
            break;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == (fb < 0.0) {
            b = x;
            fb = fx;
            sb = fx;
            if side == -1 {
                sa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            sa = fx;
            if side == 1 {
                sb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let r = find_root(|t| t - 0.5, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(r, 0.5);
    }

    #[test]
    fn sqrt_two() {
        let r = find_root(|t| t * t - 2.0, 1.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() <= 1e-14);
    }

    #[test]
    fn reversed_bracket_is_accepted() {
        let r = find_root(|t| t.cos(), 2.0, 1.0, 0.0).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        let err = find_root(|t| t * t + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Bracketing { .. }));
    }

    #[test]
    fn steep_function_still_converges() {
        let r = find_root(|t| (t - 0.3).powi(9) * 1e6, 0.0, 1.0, 0.0).unwrap();
        assert!((r - 0.3).abs() < 1e-3);
    }
}
