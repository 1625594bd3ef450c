use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::l1_sphere_factor;
use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::regions::{rho_sphere, Cap, SphereDensityOptions, SphericalRegion, Vec3};
use crate::specfun::{gauss_legendre, normalized_associated_legendre};
use crate::{complex_normal, trial_rng};

use super::{ConcentrationReport, TrialRatio};

const LAMBDA2_MAX_DEGREE: usize = 20;
const LAMBDA1_MAX_DEGREE: usize = 10;

fn dim(l: usize) -> usize {
    (l + 1) * (l + 1)
}

/// `(l, m)` for each basis index `l² + l + m`.
fn degrees(l_max: usize) -> impl Iterator<Item = (usize, i64)> {
    (0..=l_max).flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m)))
}

/// `Y_l^m = s_m N_l^{|m|} P_l^{|m|}(cos θ) e^{imφ}` with `s_m = (-1)^m` for `m < 0`.
fn sign(m: i64) -> f64 {
    if m < 0 && m % 2 != 0 {
        -1.0
    } else {
        1.0
    }
}

/// All `Y_l^m(x)` for `l ≤ L`, ordered by `l² + l + m`.
fn harmonics(l_max: usize, x: Vec3) -> Vec<Complex64> {
    let t = x[2].clamp(-1.0, 1.0);
    let table = normalized_associated_legendre(l_max, t).expect("degree within cap");
    let phi = x[1].atan2(x[0]);
    degrees(l_max)
        .map(|(l, m)| Complex64::from_polar(sign(m) * table[l][m.unsigned_abs() as usize], m as f64 * phi))
        .collect()
}

fn point(t: f64, phi: f64) -> Vec3 {
    let s = (1.0 - t * t).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), t]
}

/// A finite spherical harmonic expansion of degree `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalExpansion {
    pub degree: usize,
    pub coeffs: Vec<Complex64>,
}

impl SphericalExpansion {
    pub fn new(degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != dim(degree) {
            return Err(Error::Shape(format!("degree {degree} needs {} coefficients, got {}", dim(degree), coeffs.len())));
        }
        Ok(Self { degree, coeffs })
    }

    /// `a_l^m`, with `|m| ≤ l ≤ L`.
    pub fn coefficient(&self, l: usize, m: i64) -> Complex64 {
        self.coeffs[((l * l + l) as i64 + m) as usize]
    }

    pub fn eval(&self, x: Vec3) -> Complex64 {
        harmonics(self.degree, x).iter().zip(&self.coeffs).map(|(y, a)| y * a).sum()
    }

    /// `∫ |f|² dσ` by Gauss-Legendre in `cos θ` (order `L+1`) times a
    /// `2L+2`-point trapezoid in `φ`, exact for this degree.
    pub fn norm_sq_quadrature(&self) -> f64 {
        let l = self.degree;
        let rule = gauss_legendre(l + 1, -1.0, 1.0);
        let np = 2 * l + 2;
        let mut s = 0.0;
        for (t, w) in rule.iter() {
            for j in 0..np {
                let phi = 2.0 * PI * j as f64 / np as f64;
                s += w * 2.0 * PI / np as f64 * self.eval(point(t, phi)).norm_sqr();
            }
        }
        s
    }
}

/// Union of arcs `[a, b] ⊂ [0, 2π]` on one latitude circle.
fn merge_arcs(mut arcs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut pieces = Vec::new();
    for (a, b) in arcs.drain(..) {
        if b - a >= 2.0 * PI {
            return vec![(0.0, 2.0 * PI)];
        }
        let a0 = a.rem_euclid(2.0 * PI);
        let b0 = a0 + (b - a);
        if b0 > 2.0 * PI {
            pieces.push((a0, 2.0 * PI));
            pieces.push((0.0, b0 - 2.0 * PI));
        } else {
            pieces.push((a0, b0));
        }
    }
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in pieces {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn complement_arcs(arcs: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut prev = 0.0;
    for &(a, b) in arcs {
        if a > prev {
            out.push((prev, a));
        }
        prev = b;
    }
    if prev < 2.0 * PI {
        out.push((prev, 2.0 * PI));
    }
    out
}

fn cap_arc(cap: &Cap, t: f64) -> Option<(f64, f64)> {
    let s = (1.0 - t * t).max(0.0).sqrt();
    let [cx, cy, cz] = cap.center;
    let rc = cx.hypot(cy);
    if s * rc < 1e-15 {
        return (cz * t >= cap.cos_angle).then_some((0.0, 2.0 * PI));
    }
    let q = (cap.cos_angle - cz * t) / (s * rc);
    if q <= -1.0 {
        Some((0.0, 2.0 * PI))
    } else if q > 1.0 {
        None
    } else {
        let phi0 = cy.atan2(cx);
        let h = q.acos();
        Some((phi0 - h, phi0 + h))
    }
}

/// Arcs of `Ω` on the latitude circle at height `t`.
fn arcs_at(omega: &SphericalRegion, t: f64) -> Vec<(f64, f64)> {
    match omega {
        SphericalRegion::Caps { caps } => merge_arcs(caps.iter().filter_map(|c| cap_arc(c, t)).collect()),
        SphericalRegion::Raster(r) => {
            let theta = t.clamp(-1.0, 1.0).acos();
            let i = ((theta / PI * r.n_theta as f64) as usize).min(r.n_theta - 1);
            let dp = 2.0 * PI / r.n_phi as f64;
            merge_arcs(
                (0..r.n_phi)
                    .filter(|&j| r.mask[i * r.n_phi + j])
                    .map(|j| (j as f64 * dp, (j + 1) as f64 * dp))
                    .collect(),
            )
        }
    }
}

/// Heights where the arc structure of `Ω` changes non-smoothly.
fn breakpoints(omega: &SphericalRegion) -> Vec<f64> {
    let mut b = vec![-1.0, 1.0];
    match omega {
        SphericalRegion::Caps { caps } => {
            for c in caps {
                let th = c.center[2].clamp(-1.0, 1.0).acos();
                let al = c.cos_angle.clamp(-1.0, 1.0).acos();
                b.extend([(th - al).cos(), (th + al).cos()]);
            }
            for (i, c1) in caps.iter().enumerate() {
                for c2 in &caps[i + 1..] {
                    b.extend(circle_crossings(c1, c2));
                }
            }
        }
        SphericalRegion::Raster(r) => b.extend((1..r.n_theta).map(|i| (i as f64 * PI / r.n_theta as f64).cos())),
    }
    b.sort_by(f64::total_cmp);
    b.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    b
}

/// Heights of the points where two cap boundary circles cross.
fn circle_crossings(c1: &Cap, c2: &Cap) -> Vec<f64> {
    let (a, b) = (c1.center, c2.center);
    let g = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let det = 1.0 - g * g;
    if det < 1e-14 {
        return Vec::new();
    }
    let u = (c1.cos_angle - c2.cos_angle * g) / det;
    let v = (c2.cos_angle - c1.cos_angle * g) / det;
    let p: Vec3 = [u * a[0] + v * b[0], u * a[1] + v * b[1], u * a[2] + v * b[2]];
    let n: Vec3 = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let n2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
    let gamma2 = (1.0 - (u * c1.cos_angle + v * c2.cos_angle)) / n2;
    if gamma2 < 0.0 {
        return Vec::new();
    }
    let gm = gamma2.sqrt();
    vec![p[2] + gm * n[2], p[2] - gm * n[2]]
}

/// Nodes and weights in `t = cos θ`: on each panel between breakpoints,
/// `t = a + (b - a)(1 - cos πu)/2` with Gauss-Legendre in `u`, which absorbs
/// square-root behaviour at the panel ends.
fn latitude_rule(breaks: &[f64], order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order, 0.0, 1.0);
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a < 1e-15 {
            continue;
        }
        for (u, wu) in rule.iter() {
            let t = a + (b - a) * 0.5 * (1.0 - (PI * u).cos());
            out.push((t, wu * (b - a) * 0.5 * PI * (PI * u).sin()));
        }
    }
    out
}

fn arc_fourier(arcs: &[(f64, f64)], d: i64) -> Complex64 {
    arcs.iter()
        .map(|&(a, b)| {
            if d == 0 {
                Complex64::new(b - a, 0.0)
            } else {
                let df = d as f64;
                (Complex64::from_polar(1.0, df * b) - Complex64::from_polar(1.0, df * a)) / Complex64::new(0.0, df)
            }
        })
        .sum()
}

/// Gram matrix `∫_Ω Y_l^m conj(Y_l'^m')` with the `φ` integral done exactly on arcs.
fn concentration_matrix(omega: &SphericalRegion, l_max: usize, nodes: &[(f64, f64)]) -> CMatrix {
    let n = dim(l_max);
    let idx: Vec<(usize, i64)> = degrees(l_max).collect();
    let partial: Vec<Vec<Complex64>> = nodes
        .par_iter()
        .map(|&(t, w)| {
            let arcs = arcs_at(omega, t);
            let mut acc = vec![Complex64::new(0.0, 0.0); n * n];
            if arcs.is_empty() {
                return acc;
            }
            let table = normalized_associated_legendre(l_max, t).expect("degree within cap");
            let four: Vec<Complex64> = (-2 * l_max as i64..=2 * l_max as i64).map(|d| arc_fourier(&arcs, d)).collect();
            let vals: Vec<f64> =
                idx.iter().map(|&(l, m)| sign(m) * table[l][m.unsigned_abs() as usize] * w).collect();
            let raw: Vec<f64> = idx.iter().map(|&(l, m)| sign(m) * table[l][m.unsigned_abs() as usize]).collect();
            for i in 0..n {
                for j in 0..n {
                    let d = idx[i].1 - idx[j].1;
                    acc[i * n + j] += four[(d + 2 * l_max as i64) as usize] * (vals[i] * raw[j]);
                }
            }
            acc
        })
        .collect();
    let mut m = CMatrix::zeros(n);
    for acc in partial {
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += acc[i * n + j];
            }
        }
    }
    m
}

/// A single cap is moved to the north pole; `λ_p` is rotation invariant.
fn polar_equivalent(omega: &SphericalRegion) -> Option<SphericalRegion> {
    match omega {
        SphericalRegion::Caps { caps } if caps.len() == 1 => {
            Some(SphericalRegion::single_cap(Cap { center: [0.0, 0.0, 1.0], cos_angle: caps[0].cos_angle }))
        }
        _ => None,
    }
}

const LAMBDA2_TOL: f64 = 1e-10;

/// Largest eigenvalue of the concentration matrix of `S_L` on `Ω`, i.e. `λ₂(Ω, S_L)`.
///
/// For a polar cap a Gauss-Legendre rule of order `L+1` on `[cos θ_c, 1]` is
/// exact. Otherwise the latitude rule is doubled until the eigenvalue is
/// stable to `1e-10`; failure to stabilise is an accuracy error.
pub fn sphere_lambda2(omega: &SphericalRegion, l: usize) -> Result<f64> {
    if l > LAMBDA2_MAX_DEGREE {
        return domain(format!("degree {l} exceeds the supported maximum {LAMBDA2_MAX_DEGREE}"));
    }
    omega.validate()?;
    if omega.is_empty() {
        return Ok(0.0);
    }
    if let Some(polar) = polar_equivalent(omega) {
        let SphericalRegion::Caps { caps } = &polar else { unreachable!() };
        let rule = gauss_legendre(l + 1, caps[0].cos_angle, 1.0);
        let nodes: Vec<(f64, f64)> = rule.iter().collect();
        return Ok(hermitian_eigen(&concentration_matrix(&polar, l, &nodes))?.max());
    }
    let breaks = breakpoints(omega);
    let mut order = 2 * l + 8;
    let mut prev = hermitian_eigen(&concentration_matrix(omega, l, &latitude_rule(&breaks, order)))?.max();
    for _ in 0..4 {
        order *= 2;
        let next = hermitian_eigen(&concentration_matrix(omega, l, &latitude_rule(&breaks, order)))?.max();
        if (next - prev).abs() <= LAMBDA2_TOL {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Accuracy(format!("concentration matrix quadrature did not stabilise for L={l}")))
}

/// Quadrature nodes split into those inside and outside `Ω`: the latitude rule
/// in `t` times Gauss-Legendre on arc pieces no longer than `π/2`.
struct SplitGrid {
    inside: Vec<(Vec3, f64)>,
    outside: Vec<(Vec3, f64)>,
}

fn split_grid(omega: &SphericalRegion, t_order: usize, phi_order: usize) -> SplitGrid {
    let rule = gauss_legendre(phi_order, 0.0, 1.0);
    let mut grid = SplitGrid { inside: Vec::new(), outside: Vec::new() };
    for (t, wt) in latitude_rule(&breakpoints(omega), t_order) {
        let arcs = arcs_at(omega, t);
        let comp = complement_arcs(&arcs);
        for (set, dst) in [(&arcs, &mut grid.inside), (&comp, &mut grid.outside)] {
            for &(a, b) in set.iter() {
                let pieces = ((b - a) / (0.5 * PI)).ceil().max(1.0) as usize;
                let h = (b - a) / pieces as f64;
                for p in 0..pieces {
                    for (u, wu) in rule.iter() {
                        dst.push((point(t, a + (p as f64 + u) * h), wt * wu * h));
                    }
                }
            }
        }
    }
    grid
}

struct Basis {
    rows: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
    inside: usize,
}

impl Basis {
    fn new(grid: &SplitGrid, l: usize) -> Self {
        let all: Vec<&(Vec3, f64)> = grid.inside.iter().chain(&grid.outside).collect();
        Basis {
            rows: all.par_iter().map(|(x, _)| harmonics(l, *x)).collect(),
            weights: all.iter().map(|(_, w)| *w).collect(),
            inside: grid.inside.len(),
        }
    }

    fn values(&self, a: &[Complex64]) -> Vec<Complex64> {
        self.rows.iter().map(|r| r.iter().zip(a).map(|(y, c)| y * c).sum()).collect()
    }

    fn ratio_of(&self, f: &[Complex64]) -> f64 {
        let (mut inside, mut total) = (0.0, 0.0);
        for (k, (v, w)) in f.iter().zip(&self.weights).enumerate() {
            let a = v.norm() * w;
            total += a;
            if k < self.inside {
                inside += a;
            }
        }
        if total > 0.0 {
            inside / total
        } else {
            0.0
        }
    }
}

/// Coordinate ascent on the 1-concentration ratio: each coefficient is nudged
/// by `±step` and `±i·step` (relative to the coefficient norm), with the step
/// halved after a sweep without improvement.
fn ascend(basis: &Basis, a: &mut [Complex64], sweeps: usize) -> f64 {
    let mut f = basis.values(a);
    let mut best = basis.ratio_of(&f);
    let scale = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut step = 0.25 * scale;
    let dirs = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
    let mut trial = f.clone();
    for _ in 0..sweeps {
        let mut improved = false;
        for j in 0..a.len() {
            for d in dirs {
                let delta = d * step;
                for (k, t) in trial.iter_mut().enumerate() {
                    *t = f[k] + basis.rows[k][j] * delta;
                }
                let r = basis.ratio_of(&trial);
                if r > best {
                    best = r;
                    a[j] += delta;
                    std::mem::swap(&mut f, &mut trial);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-4 * scale {
                break;
            }
        }
    }
    best
}

/// Randomised lower bound for `λ₁(Ω, S_L)` checked against the conjectured
/// bound `(2A-1)^{-1} ρ_{S²}(Ω, L)`.
///
/// Starts from the best `L²` concentrate and from `trials` complex Gaussian
/// coefficient draws; the four best starts are refined by coordinate ascent.
/// The best vector is re-measured on a grid of twice the resolution and the
/// difference is reported as the quadrature tolerance. A margin below
/// `-eps_quad` means the conjectured bound was exceeded; callers flag it.
pub fn sphere_lambda1_search(omega: &SphericalRegion, l: usize, trials: usize, seed: u64) -> Result<ConcentrationReport> {
    if l > LAMBDA1_MAX_DEGREE {
        return domain(format!("degree {l} exceeds the supported maximum {LAMBDA1_MAX_DEGREE}"));
    }
    omega.validate()?;
    let rho = rho_sphere(omega, l, &SphereDensityOptions::default())?;
    let bound = l1_sphere_factor()? * rho.value;
    let description = format!("sphere L={l} rho={} trials={trials}", rho.value);
    if omega.is_empty() {
        let t = (0..trials).map(|i| TrialRatio { index: i, observed: 0.0, bound }).collect();
        return Ok(ConcentrationReport::from_trials(1.0, 0.0, description, t));
    }
    let region = polar_equivalent(omega).unwrap_or_else(|| omega.clone());
    let (t_order, phi_order) = (3 * l + 12, l + 8);
    let basis = Basis::new(&split_grid(&region, t_order, phi_order), l);
    let n = dim(l);

    let mut starts: Vec<(f64, Vec<Complex64>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let a: Vec<Complex64> = (0..n).map(|_| complex_normal(&mut rng)).collect();
            (basis.ratio_of(&basis.values(&a)), a)
        })
        .collect();
    let mut trial_ratios: Vec<TrialRatio> =
        starts.iter().enumerate().map(|(i, s)| TrialRatio { index: i, observed: s.0, bound }).collect();
    let eig = hermitian_eigen(&concentration_matrix(
        &region,
        l,
        &latitude_rule(&breakpoints(&region), 2 * l + 8),
    ))?;
    let top = eig.vector(n - 1);
    starts.push((basis.ratio_of(&basis.values(&top)), top));
    starts.sort_by(|a, b| b.0.total_cmp(&a.0));
    starts.truncate(4);
    let refined: Vec<(f64, Vec<Complex64>)> = starts
        .into_par_iter()
        .map(|(_, mut a)| (ascend(&basis, &mut a, 40), a))
        .collect();
    let (best, best_a) = refined.into_iter().max_by(|a, b| a.0.total_cmp(&b.0)).expect("at least one start");
    let fine = Basis::new(&split_grid(&region, 2 * t_order, 2 * phi_order), l);
    let best_fine = fine.ratio_of(&fine.values(&best_a));
    trial_ratios.push(TrialRatio { index: trials, observed: best, bound });
    Ok(ConcentrationReport::from_trials(1.0, (best_fine - best).abs(), description, trial_ratios))
}
