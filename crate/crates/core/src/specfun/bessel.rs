//! Bessel functions `J_0`, `J_1` of real argument and their positive zeros.
//!
//! Three regimes: power series below 8, Miller's backward recurrence on
//! `[8, 25)`, and the Hankel asymptotic expansion from 25 on. Each regime keeps
//! the absolute error under `1e-13` on its range.

use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::roots::find_root;

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

impl BesselOrder {
    fn nu(self) -> u32 {
        match self {
            BesselOrder::Zero => 0,
            BesselOrder::One => 1,
        }
    }
}

impl TryFrom<u32> for BesselOrder {
    type Error = Error;

    fn try_from(v: u32) -> Result<Self> {
        match v {
            0 => Ok(BesselOrder::Zero),
            1 => Ok(BesselOrder::One),
            _ => Err(Error::Domain(format!("Bessel order {v} not supported"))),
        }
    }
}

fn series(nu: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let q = -h * h;
    let mut term = if nu == 0 { 1.0 } else { h };
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + nu as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) || term == 0.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Miller's algorithm with the normalisation `J_0 + 2 Σ J_{2k} = 1`.
fn miller(nu: u32, x: f64) -> f64 {
    let start = 2 * ((1.5 * x) as usize / 2 + 40);
    let two_over_x = 2.0 / x;
    let (mut next, mut cur) = (0.0f64, 1e-30f64);
    let mut norm = 0.0;
    let mut j0 = 0.0;
    let mut j1 = 0.0;
    for k in (1..=start).rev() {
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        let order = k - 1;
        if order == 1 {
            j1 = cur;
        }
        if order == 0 {
            j0 = cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e200 {
            cur *= 1e-200;
            next *= 1e-200;
            norm *= 1e-200;
            j1 *= 1e-200;
        }
    }
    norm += j0;
    if nu == 0 {
        j0 / norm
    } else {
        j1 / norm
    }
}

fn hankel(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut k = 0usize;
    let mut last = f64::INFINITY;
    loop {
        let mag = term.abs();
        if mag > last || mag < 1e-17 {
            break;
        }
        last = mag;
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        let kk = (2 * k + 1) as f64;
        term *= (mu - kk * kk) / ((k + 1) as f64 * 8.0 * x);
        k += 1;
    }
    let chi = x - (0.5 * nu as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `J_order(x)`; negative arguments use the parity of `J_0`/`J_1`.
pub fn bessel_j(order: BesselOrder, x: f64) -> f64 {
    let nu = order.nu();
    let ax = x.abs();
    let v = if ax == 0.0 {
        if nu == 0 {
            1.0
        } else {
            0.0
        }
    } else if ax < SERIES_LIMIT {
        series(nu, ax)
    } else if ax < ASYMPTOTIC_LIMIT {
        miller(nu, ax)
    } else {
        hankel(nu, ax)
    };
    if x < 0.0 && nu == 1 {
        -v
    } else {
        v
    }
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j(BesselOrder::Zero, x)
}

pub fn bessel_j1(x: f64) -> f64 {
    bessel_j(BesselOrder::One, x)
}

/// The `m`-th positive zero `j_{order,m}` (`m ≥ 1`).
pub fn bessel_zero(order: BesselOrder, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("zero index starts at 1".into()));
    }
    const STEP: f64 = 0.1;
    let f = |x: f64| bessel_j(order, x);
    let mut a = STEP;
    let mut fa = f(a);
    let mut found = 0;
    loop {
        let b = a + STEP;
        let fb = f(b);
        if fa * fb < 0.0 {
            found += 1;
            if found == m {
                return find_root(f, a, b, 0.0);
            }
        }
        a = b;
        fa = fb;
    }
}
