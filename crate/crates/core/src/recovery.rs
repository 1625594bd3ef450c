//! L1 recovery in the discrete band-limited model: Logan denoising and
//! Donoho-Stark completion.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::recovery_threshold_line;
use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::regions::discrete_density;
use crate::spaces::{band_dictionary, contiguous_band};
use crate::{complex_normal, trial_rng};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// `min_c ‖y - Φc‖₁`.
    Denoise,
    /// `min_c ‖Φc‖₁` subject to `(Φc)_i = y_i` on the observed indices.
    Completion,
}

/// An L1 program over an `N × k` dictionary with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Problem {
    pub kind: ProblemKind,
    pub n: usize,
    pub k: usize,
    /// Row-major `N × k`.
    pub dictionary: Vec<Complex64>,
    pub observation: Vec<Complex64>,
    /// Completion only: `true` on the sensed indices `Ω^c`.
    pub observed: Vec<bool>,
}

const ORTHONORMAL_TOL: f64 = 1e-10;

impl L1Problem {
    pub fn denoise(n: usize, k: usize, dictionary: Vec<Complex64>, y: Vec<Complex64>) -> Result<Self> {
        let p = Self { kind: ProblemKind::Denoise, n, k, dictionary, observation: y, observed: vec![true; n] };
        p.validate()?;
        Ok(p)
    }

    pub fn completion(
        n: usize,
        k: usize,
        dictionary: Vec<Complex64>,
        y: Vec<Complex64>,
        observed: Vec<bool>,
    ) -> Result<Self> {
        let p = Self { kind: ProblemKind::Completion, n, k, dictionary, observation: y, observed };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let (n, k) = (self.n, self.k);
        if k == 0 || k > n {
            return domain(format!("need 0 < k <= N, got k={k}, N={n}"));
        }
        if self.dictionary.len() != n * k || self.observation.len() != n || self.observed.len() != n {
            return Err(Error::Shape(format!("dictionary must be {n}x{k} with length-{n} observation and mask")));
        }
        for a in 0..k {
            for b in 0..=a {
                let g: Complex64 = (0..n).map(|t| self.dictionary[t * k + a].conj() * self.dictionary[t * k + b]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                if (g - target).norm() > ORTHONORMAL_TOL {
                    return domain("dictionary columns must be orthonormal");
                }
            }
        }
        Ok(())
    }

    fn synth(&self, c: &[Complex64]) -> Vec<Complex64> {
        let k = self.k;
        (0..self.n).map(|t| (0..k).map(|j| self.dictionary[t * k + j] * c[j]).sum()).collect()
    }

    fn analyze(&self, v: &[Complex64]) -> Vec<Complex64> {
        let k = self.k;
        let mut out = vec![ZERO; k];
        for (t, x) in v.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.dictionary[t * k + j].conj() * x;
            }
        }
        out
    }

    /// The program's objective at `c`.
    pub fn objective(&self, c: &[Complex64]) -> f64 {
        let s = self.synth(c);
        match self.kind {
            ProblemKind::Denoise => s.iter().zip(&self.observation).map(|(a, y)| (y - a).norm()).sum(),
            ProblemKind::Completion => s.iter().map(|a| a.norm()).sum(),
        }
    }

    /// Largest constraint violation `|(Φc)_i - y_i|` on observed indices
    /// (zero for denoising, which is unconstrained).
    pub fn constraint_violation(&self, c: &[Complex64]) -> f64 {
        match self.kind {
            ProblemKind::Denoise => 0.0,
            ProblemKind::Completion => self
                .synth(c)
                .iter()
                .zip(&self.observation)
                .zip(&self.observed)
                .filter(|(_, &o)| o)
                .map(|((a, y), _)| (a - y).norm())
                .fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub obj_tol: f64,
    /// Iterations between objective comparisons.
    pub window: usize,
    pub max_iter: usize,
    /// ADMM penalty for data scaled to unit peak magnitude.
    pub penalty: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { feas_tol: 1e-8, obj_tol: 1e-9, window: 50, max_iter: 50_000, penalty: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub coefficients: Vec<Complex64>,
    pub objective: f64,
    pub feasibility: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn soft(v: Complex64, tau: f64) -> Complex64 {
    let a = v.norm();
    if a <= tau {
        ZERO
    } else {
        v * ((a - tau) / a)
    }
}

fn max_abs(v: impl Iterator<Item = Complex64>) -> f64 {
    v.map(|z| z.norm()).fold(0.0, f64::max)
}

/// Least squares `min ‖A x - b‖₂` (minimum-norm) via the eigendecomposition
/// of `AᴴA`, dropping eigenvalues below `1e-12` of the largest.
fn least_squares(rows: &[&[Complex64]], b: &[Complex64], k: usize) -> Result<Vec<Complex64>> {
    let mut g = CMatrix::zeros(k);
    let mut rhs = vec![ZERO; k];
    for (r, &bv) in rows.iter().zip(b) {
        for i in 0..k {
            rhs[i] += r[i].conj() * bv;
            for j in 0..k {
                g[(i, j)] += r[i].conj() * r[j];
            }
        }
    }
    let eig = hermitian_eigen(&g)?;
    let cut = 1e-12 * eig.max().max(0.0);
    let mut x = vec![ZERO; k];
    for (idx, &lam) in eig.values.iter().enumerate() {
        if lam > cut {
            let v = eig.vector(idx);
            let coef: Complex64 = v.iter().zip(&rhs).map(|(a, b)| a.conj() * b).sum::<Complex64>() / lam;
            for (xi, vi) in x.iter_mut().zip(&v) {
                *xi += vi * coef;
            }
        }
    }
    Ok(x)
}

/// Projection onto `{c : M c = y_O}` with `M = P_O Φ`:
/// `c ↦ c - M⁺(M c - y_O)`.
struct AffineProjector {
    rows: Vec<usize>,
    pinv: Vec<Complex64>,
    k: usize,
}

impl AffineProjector {
    fn new(p: &L1Problem) -> Result<Self> {
        let k = p.k;
        let rows: Vec<usize> = (0..p.n).filter(|&t| p.observed[t]).collect();
        let mut g = CMatrix::zeros(k);
        for &t in &rows {
            let r = &p.dictionary[t * k..(t + 1) * k];
            for i in 0..k {
                for j in 0..k {
                    g[(i, j)] += r[i].conj() * r[j];
                }
            }
        }
        let eig = hermitian_eigen(&g)?;
        let cut = 1e-12 * eig.max().max(1.0);
        // G⁺ = Σ v vᴴ / λ over the retained spectrum
        let mut gp = vec![ZERO; k * k];
        for (idx, &lam) in eig.values.iter().enumerate() {
            if lam > cut {
                let v = eig.vector(idx);
                for i in 0..k {
                    for j in 0..k {
                        gp[i * k + j] += v[i] * v[j].conj() / lam;
                    }
                }
            }
        }
        // M⁺ = G⁺ Mᴴ, stored k × |O|
        let m = rows.len();
        let mut pinv = vec![ZERO; k * m];
        for (col, &t) in rows.iter().enumerate() {
            let r = &p.dictionary[t * k..(t + 1) * k];
            for i in 0..k {
                pinv[i * m + col] = (0..k).map(|j| gp[i * k + j] * r[j].conj()).sum();
            }
        }
        Ok(Self { rows, pinv, k })
    }

    fn project(&self, p: &L1Problem, c: &mut [Complex64]) {
        let k = self.k;
        let m = self.rows.len();
        let resid: Vec<Complex64> = self
            .rows
            .iter()
            .map(|&t| (0..k).map(|j| p.dictionary[t * k + j] * c[j]).sum::<Complex64>() - p.observation[t])
            .collect();
        for i in 0..k {
            c[i] -= (0..m).map(|col| self.pinv[i * m + col] * resid[col]).sum::<Complex64>();
        }
    }
}

/// Solves the L1 program by ADMM on the split `s = Φc` (completion) or
/// `e = y - Φc` (denoising), with complex soft-thresholding as the proximal
/// step. Data are scaled to unit peak magnitude and the penalty is fixed.
///
/// Stops when the split residual is below `feas_tol` and the relative
/// objective change over the last `window` iterations is below `obj_tol`.
/// A converged iterate is then polished: the rows where the residual
/// vanishes are solved exactly, and the polished point is kept if it is
/// feasible and no worse. Hitting `max_iter` returns a non-converged result.
pub fn solve_l1(p: &L1Problem, opts: &SolverOptions) -> Result<SolverResult> {
    p.validate()?;
    if !(opts.penalty > 0.0) || opts.window == 0 {
        return domain("penalty must be positive and window non-zero");
    }
    let scale = max_abs(p.observation.iter().zip(&p.observed).filter(|(_, &o)| o).map(|(y, _)| *y)).max(f64::MIN_POSITIVE);
    let y: Vec<Complex64> = p.observation.iter().map(|v| v / scale).collect();
    let scaled = L1Problem { observation: y.clone(), ..p.clone() };
    let rho = opts.penalty;
    let n = p.n;

    let projector = match p.kind {
        ProblemKind::Completion => Some(AffineProjector::new(&scaled)?),
        ProblemKind::Denoise => None,
    };
    let mut c = match p.kind {
        ProblemKind::Denoise => scaled.analyze(&y),
        ProblemKind::Completion => {
            let mut c = vec![ZERO; p.k];
            projector.as_ref().expect("completion projector").project(&scaled, &mut c);
            c
        }
    };
    let mut z = match p.kind {
        ProblemKind::Denoise => {
            let s = scaled.synth(&c);
            y.iter().zip(&s).map(|(a, b)| a - b).collect::<Vec<_>>()
        }
        ProblemKind::Completion => scaled.synth(&c),
    };
    let mut u = vec![ZERO; n];
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut split = f64::INFINITY;

    while iterations < opts.max_iter {
        iterations += 1;
        match p.kind {
            ProblemKind::Denoise => {
                let target: Vec<Complex64> = (0..n).map(|t| y[t] - z[t] - u[t]).collect();
                c = scaled.analyze(&target);
                let s = scaled.synth(&c);
                for t in 0..n {
                    z[t] = soft(y[t] - s[t] - u[t], 1.0 / rho);
                }
                split = 0.0;
                for t in 0..n {
                    let r = s[t] + z[t] - y[t];
                    u[t] += r;
                    split = split.max(r.norm());
                }
            }
            ProblemKind::Completion => {
                let target: Vec<Complex64> = (0..n).map(|t| z[t] + u[t]).collect();
                c = scaled.analyze(&target);
                projector.as_ref().expect("completion projector").project(&scaled, &mut c);
                let s = scaled.synth(&c);
                for t in 0..n {
                    z[t] = soft(s[t] - u[t], 1.0 / rho);
                }
                split = 0.0;
                for t in 0..n {
                    let r = z[t] - s[t];
                    u[t] += r;
                    split = split.max(r.norm());
                }
            }
        }
        let obj = scaled.objective(&c);
        history.push(obj);
        if history.len() > opts.window {
            let old = history[history.len() - 1 - opts.window];
            if split <= opts.feas_tol && (obj - old).abs() <= opts.obj_tol * obj.max(1.0) {
                converged = true;
                break;
            }
        }
    }

    if converged {
        if let Some(better) = polish(&scaled, &c, opts.feas_tol)? {
            c = better;
        }
    }
    let feasibility = split.max(scaled.constraint_violation(&c));
    let coefficients: Vec<Complex64> = c.iter().map(|v| v * scale).collect();
    Ok(SolverResult { objective: p.objective(&coefficients), coefficients, feasibility: feasibility * scale, iterations, converged })
}

/// Relative threshold under which a residual counts as an active zero.
const ACTIVE_TOL: f64 = 1e-6;

fn polish(p: &L1Problem, c: &[Complex64], feas_tol: f64) -> Result<Option<Vec<Complex64>>> {
    let k = p.k;
    let s = p.synth(c);
    let mut rows: Vec<&[Complex64]> = Vec::new();
    let mut rhs = Vec::new();
    for t in 0..p.n {
        let row = &p.dictionary[t * k..(t + 1) * k];
        let active = match p.kind {
            ProblemKind::Denoise => (p.observation[t] - s[t]).norm() <= ACTIVE_TOL,
            ProblemKind::Completion => p.observed[t] || s[t].norm() <= ACTIVE_TOL,
        };
        if active {
            rows.push(row);
            rhs.push(match p.kind {
                ProblemKind::Completion if !p.observed[t] => ZERO,
                _ => p.observation[t],
            });
        }
    }
    if rows.len() < k {
        return Ok(None);
    }
    let cand = least_squares(&rows, &rhs, k)?;
    let fits = rows.iter().zip(&rhs).all(|(r, b)| {
        let v: Complex64 = r.iter().zip(&cand).map(|(a, x)| a * x).sum();
        (v - b).norm() <= feas_tol
    });
    if fits && p.objective(&cand) <= p.objective(c) + 1e-12 && p.constraint_violation(&cand) <= feas_tol {
        Ok(Some(cand))
    } else {
        Ok(None)
    }
}

/// Real orthonormal trigonometric dictionary: the constant column, then
/// `√(2/N) cos(2πjt/N)` and `√(2/N) sin(2πjt/N)` for `j = 1, 2, …` until `k`
/// columns. Requires `k < N/2` so every column is a full-rank pair member.
pub fn real_trig_dictionary(n: usize, k: usize) -> Result<Vec<Complex64>> {
    if k == 0 || 2 * k > n {
        return domain(format!("real trigonometric dictionary needs 0 < k <= N/2, got k={k}, N={n}"));
    }
    let nf = n as f64;
    let mut cols: Vec<Box<dyn Fn(usize) -> f64>> = vec![Box::new(move |_| 1.0 / nf.sqrt())];
    let mut j = 1;
    while cols.len() < k {
        let jf = j as f64;
        cols.push(Box::new(move |t| (2.0 / nf).sqrt() * (2.0 * PI * jf * t as f64 / nf).cos()));
        if cols.len() < k {
            cols.push(Box::new(move |t| (2.0 / nf).sqrt() * (2.0 * PI * jf * t as f64 / nf).sin()));
        }
        j += 1;
    }
    Ok((0..n).flat_map(|t| cols.iter().map(move |f| Complex64::new(f(t), 0.0))).collect())
}

/// Noise used by the denoising experiment: uniform phase, fixed modulus
/// `amplitude × ‖f‖_∞` on every index of `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub amplitude: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { amplitude: 10.0 }
    }
}

/// Exactness threshold on the relative coefficient error.
pub const EXACT_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub n: usize,
    pub band: usize,
    pub omega: Vec<usize>,
    /// Discrete density of `Ω` (exact, so also its conservative value).
    pub rho: f64,
    pub gate_cleared: bool,
    /// `max_j |ĉ_j - c_j| / max_j |c_j|`.
    pub error: f64,
    pub exact: bool,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn check_indices(n: usize, omega: &[usize]) -> Result<()> {
    if let Some(&bad) = omega.iter().find(|&&i| i >= n) {
        return domain(format!("index {bad} outside 0..{n}"));
    }
    Ok(())
}

fn report(n: usize, band: usize, omega: &[usize], truth: &[Complex64], res: &SolverResult) -> Result<RecoveryReport> {
    let rho = discrete_density(omega, n, band)?;
    let peak = max_abs(truth.iter().copied()).max(f64::MIN_POSITIVE);
    let error = max_abs(res.coefficients.iter().zip(truth).map(|(a, b)| a - b)) / peak;
    let mut omega = omega.to_vec();
    omega.sort_unstable();
    omega.dedup();
    Ok(RecoveryReport {
        n,
        band,
        omega,
        rho,
        gate_cleared: rho < recovery_threshold_line(),
        error,
        exact: error < EXACT_TOL,
        objective: res.objective,
        iterations: res.iterations,
        converged: res.converged,
    })
}

/// Random band-limited `f` plus noise supported exactly on `Ω`, recovered by
/// `min ‖y - Φc‖₁`.
pub fn logan_experiment(
    n: usize,
    band: usize,
    omega: &[usize],
    noise: NoiseSpec,
    seed: u64,
    opts: &SolverOptions,
) -> Result<RecoveryReport> {
    check_indices(n, omega)?;
    let b = contiguous_band(n, band)?;
    let phi = band_dictionary(n, &b);
    let mut rng = trial_rng(seed, 0);
    let truth: Vec<Complex64> = (0..band).map(|_| complex_normal(&mut rng)).collect();
    let p0 = L1Problem::denoise(n, band, phi, vec![ZERO; n])?;
    let f = p0.synth(&truth);
    let amp = noise.amplitude * max_abs(f.iter().copied());
    let mut y = f;
    let mut hit = vec![false; n];
    for &i in omega {
        if !std::mem::replace(&mut hit[i], true) {
            y[i] += Complex64::from_polar(amp, rng.random_range(0.0..2.0 * PI));
        }
    }
    let p = L1Problem { observation: y, ..p0 };
    let res = solve_l1(&p, opts)?;
    report(n, band, omega, &truth, &res)
}

/// Random band-limited `f` erased on `Ω`, recovered by `min ‖Φc‖₁` subject to
/// agreement with `f` on `Ω^c`.
pub fn donoho_stark_experiment(n: usize, band: usize, erased: &[usize], seed: u64, opts: &SolverOptions) -> Result<RecoveryReport> {
    check_indices(n, erased)?;
    let b = contiguous_band(n, band)?;
    let phi = band_dictionary(n, &b);
    let mut rng = trial_rng(seed, 0);
    let truth: Vec<Complex64> = (0..band).map(|_| complex_normal(&mut rng)).collect();
    let mut observed = vec![true; n];
    for &i in erased {
        observed[i] = false;
    }
    let p0 = L1Problem::completion(n, band, phi, vec![ZERO; n], observed.clone())?;
    let f = p0.synth(&truth);
    let y = f.iter().zip(&observed).map(|(v, &o)| if o { *v } else { ZERO }).collect();
    let p = L1Problem { observation: y, ..p0 };
    let res = solve_l1(&p, opts)?;
    report(n, band, erased, &truth, &res)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Logan,
    DonohoStark,
}

/// A seeded batch of recovery instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub instances: usize,
    pub n: usize,
    pub band: usize,
    /// Largest `|Ω|` drawn for scattered sets.
    pub max_size: usize,
    /// Fixed `|Ω|` for scattered sets, overriding `max_size`.
    pub size: Option<usize>,
    /// When set, `Ω` is a contiguous block of density about this value plus
    /// scattered extras, instead of a gated scattered set.
    pub rho_target: Option<f64>,
    pub noise: NoiseSpec,
    pub seed: u64,
    pub solver: SolverOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            instances: 50,
            n: 128,
            band: 8,
            max_size: 12,
            size: None,
            rho_target: None,
            noise: NoiseSpec::default(),
            seed: 20240917,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub kind: ExperimentKind,
    pub trials: Vec<RecoveryReport>,
    pub gated: usize,
    pub gated_exact: usize,
    pub ungated: usize,
    pub ungated_exact: usize,
    pub non_converged: usize,
}

impl SuiteReport {
    /// Every instance that cleared the density gate was recovered exactly.
    pub fn guarantee_holds(&self) -> bool {
        self.gated == self.gated_exact
    }
}

const GATE_ATTEMPTS: usize = 1000;

/// Draws `Ω` for one instance. Without a density target, scattered sets of
/// size `size` (or uniform in `1..=max_size`) are redrawn until they clear
/// `ρ < 1/π`.
fn draw_omega<R: Rng>(rng: &mut R, cfg: &SuiteConfig) -> Result<Vec<usize>> {
    let n = cfg.n;
    if let Some(target) = cfg.rho_target {
        if !(target > 0.0 && target <= 1.0) {
            return domain(format!("rho target must lie in (0, 1], got {target}"));
        }
        let len = ((target * n as f64 / cfg.band as f64).round() as usize).clamp(1, n);
        let start = rng.random_range(0..n);
        let mut omega: Vec<usize> = (0..len).map(|j| (start + j) % n).collect();
        let extra = rng.random_range(0..=cfg.max_size.min(n - len));
        omega.extend(sample(rng, n, extra).into_iter());
        omega.sort_unstable();
        omega.dedup();
        return Ok(omega);
    }
    let cap = cfg.size.unwrap_or(cfg.max_size).clamp(1, n);
    for _ in 0..GATE_ATTEMPTS {
        let size = cfg.size.map_or_else(|| rng.random_range(1..=cap), |s| s.min(n));
        let mut omega = sample(rng, n, size).into_vec();
        omega.sort_unstable();
        if discrete_density(&omega, n, cfg.band)? < recovery_threshold_line() {
            return Ok(omega);
        }
    }
    Err(Error::Domain(format!("no set of size {}{cap} cleared the density gate in {GATE_ATTEMPTS} draws", if cfg.size.is_some() { "" } else { "<= " })))
}

/// Runs `cfg.instances` seeded instances in parallel; instance `i` uses the
/// ChaCha stream `i` of `cfg.seed` for both `Ω` and the signal.
pub fn run_suite(kind: ExperimentKind, cfg: &SuiteConfig) -> Result<SuiteReport> {
    contiguous_band(cfg.n, cfg.band)?;
    let trials: Vec<RecoveryReport> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, i);
            let omega = draw_omega(&mut rng, cfg)?;
            let seed: u64 = rng.random();
            match kind {
                ExperimentKind::Logan => logan_experiment(cfg.n, cfg.band, &omega, cfg.noise, seed, &cfg.solver),
                ExperimentKind::DonohoStark => donoho_stark_experiment(cfg.n, cfg.band, &omega, seed, &cfg.solver),
            }
        })
        .collect::<Result<_>>()?;
    let gated = trials.iter().filter(|t| t.gate_cleared).count();
    let gated_exact = trials.iter().filter(|t| t.gate_cleared && t.exact).count();
    let ungated_exact = trials.iter().filter(|t| !t.gate_cleared && t.exact).count();
    let non_converged = trials.iter().filter(|t| !t.converged).count();
    Ok(SuiteReport { kind, gated, gated_exact, ungated: trials.len() - gated, ungated_exact, non_converged, trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dft_problem(n: usize, k: usize) -> (Vec<Complex64>, Vec<usize>) {
        let b = contiguous_band(n, k).unwrap();
        (band_dictionary(n, &b), b)
    }

    #[test]
    fn noiseless_denoise_is_exact() {
        let (phi, _) = dft_problem(32, 4);
        let truth = vec![Complex64::new(1.0, -0.5), Complex64::new(0.2, 0.0), Complex64::new(0.0, 2.0), Complex64::new(-1.0, 1.0)];
        let p0 = L1Problem::denoise(32, 4, phi, vec![ZERO; 32]).unwrap();
        let y = p0.synth(&truth);
        let p = L1Problem { observation: y, ..p0 };
        let r = solve_l1(&p, &SolverOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.objective < 1e-10);
        assert!(max_abs(r.coefficients.iter().zip(&truth).map(|(a, b)| a - b)) < 1e-10);
    }

    #[test]
    fn fully_observed_completion_interpolates() {
        let r = donoho_stark_experiment(32, 5, &[], 3, &SolverOptions::default()).unwrap();
        assert!(r.error < 1e-10 && r.converged);
    }

    #[test]
    fn empty_noise_set_is_exact() {
        let r = logan_experiment(64, 8, &[], NoiseSpec::default(), 1, &SolverOptions::default()).unwrap();
        assert!(r.error < 1e-10, "{r:?}");
        assert_eq!(r.rho, 0.0);
    }

    #[test]
    fn equispaced_noise_is_removed() {
        let omega = [0, 32, 64, 96];
        let r = logan_experiment(128, 8, &omega, NoiseSpec::default(), 5, &SolverOptions::default()).unwrap();
        assert!(r.gate_cleared);
        assert!(r.exact && r.converged, "{r:?}");
    }

    #[test]
    fn scattered_erasures_are_filled() {
        let r = donoho_stark_experiment(128, 8, &[5, 40, 77, 120], 9, &SolverOptions::default()).unwrap();
        assert!(r.gate_cleared && r.exact, "{r:?}");
    }

    #[test]
    fn denoise_not_worse_than_truth() {
        let (phi, _) = dft_problem(48, 6);
        let mut rng = trial_rng(2, 0);
        let truth: Vec<Complex64> = (0..6).map(|_| complex_normal(&mut rng)).collect();
        let p0 = L1Problem::denoise(48, 6, phi, vec![ZERO; 48]).unwrap();
        let mut y = p0.synth(&truth);
        // dense noise: the truth is feasible but not optimal
        for v in y.iter_mut().step_by(2) {
            *v += complex_normal(&mut rng);
        }
        let p = L1Problem { observation: y, ..p0 };
        let r = solve_l1(&p, &SolverOptions::default()).unwrap();
        assert!(r.objective <= p.objective(&truth) + 1e-8);
    }

    #[test]
    fn completion_respects_observations() {
        let (phi, _) = dft_problem(24, 6);
        let mut rng = trial_rng(8, 0);
        let truth: Vec<Complex64> = (0..6).map(|_| complex_normal(&mut rng)).collect();
        let mut observed = vec![true; 24];
        // far fewer observations than unknowns would need: only 4 sensed samples
        for (t, o) in observed.iter_mut().enumerate() {
            *o = t % 6 == 0;
        }
        let p0 = L1Problem::completion(24, 6, phi, vec![ZERO; 24], observed).unwrap();
        let f = p0.synth(&truth);
        let y = f.iter().zip(&p0.observed).map(|(v, &o)| if o { *v } else { ZERO }).collect();
        let p = L1Problem { observation: y, ..p0 };
        let r = solve_l1(&p, &SolverOptions::default()).unwrap();
        assert!(p.constraint_violation(&r.coefficients) <= 1e-8);
    }

    #[test]
    fn rejects_bad_dictionary() {
        let phi = vec![Complex64::new(1.0, 0.0); 8];
        assert!(L1Problem::denoise(4, 2, phi, vec![ZERO; 4]).is_err());
        assert!(real_trig_dictionary(8, 5).is_err());
    }

    #[test]
    fn real_dictionary_is_orthonormal() {
        let phi = real_trig_dictionary(16, 4).unwrap();
        assert!(L1Problem::denoise(16, 4, phi, vec![ZERO; 16]).is_ok());
    }

    #[test]
    fn suite_is_deterministic() {
        let cfg = SuiteConfig { instances: 6, n: 64, band: 4, ..Default::default() };
        let a = run_suite(ExperimentKind::Logan, &cfg).unwrap();
        let b = run_suite(ExperimentKind::Logan, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.trials.iter().all(|t| t.gate_cleared));
        assert!(a.guarantee_holds(), "{a:?}");
    }

    #[test]
    fn dense_block_demonstration_runs() {
        let cfg = SuiteConfig { instances: 4, n: 64, band: 4, rho_target: Some(0.9), ..Default::default() };
        let r = run_suite(ExperimentKind::Logan, &cfg).unwrap();
        assert_eq!(r.gated, 0);
        assert!(r.trials.iter().all(|t| t.rho >= 0.85));
    }
}
