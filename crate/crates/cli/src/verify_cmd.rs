use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sievekit::constants::compute_b_l;
use sievekit::regions::{rho_sphere, Cap, Disc, DiscRegion, PlanarRegion, PseudoBall, SphereDensityOptions, SphericalRegion};
use sievekit::spaces::{
    random_point_measure, sphere_lambda1_search, sphere_lambda2, verify_bergman_sieve, verify_bombieri, verify_gabor_sieve,
    verify_local_reproducing_disc, verify_local_reproducing_plane, verify_pw_sieve, ConcentrationReport, HermiteExpansion,
    PlaneGrid, Polynomial,
};
use sievekit::{complex_normal, trial_rng};

use crate::{num, to_value, CliError, CliResult, Outcome, EXIT_OK, EXIT_VIOLATION};

/// Stream offset separating corpus draws from region draws under one seed.
const CORPUS_STREAM: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Pw,
    Sphere2,
    Sphere1,
    Gabor,
    Bergman,
    Bombieri,
    Localrep,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Pw => "pw",
            Suite::Sphere2 => "sphere2",
            Suite::Sphere1 => "sphere1",
            Suite::Gabor => "gabor",
            Suite::Bergman => "bergman",
            Suite::Bombieri => "bombieri",
            Suite::Localrep => "localrep",
        }
    }
}

/// Random index sets of `Z_N`, alternating scattered sets and contiguous blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PwConfig {
    pub trials: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub band: usize,
    pub regions: usize,
    pub max_size: usize,
    pub seed: u64,
}

impl Default for PwConfig {
    fn default() -> Self {
        Self { trials: 500, n: 256, band: 16, regions: 20, max_size: 64, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sphere2Config {
    pub degrees: Vec<usize>,
    pub caps_deg: Vec<f64>,
    pub density: SphereDensityOptions,
    /// Slack in `λ₂ ≤ B_L ρ`.
    pub tol: f64,
    /// Slack in `λ₂(S²) = 1`.
    pub full_tol: f64,
    pub seed: u64,
}

impl Default for Sphere2Config {
    fn default() -> Self {
        Self {
            degrees: (1..=8).collect(),
            caps_deg: vec![15.0, 30.0, 60.0, 90.0],
            density: SphereDensityOptions::default(),
            tol: 1e-6,
            full_tol: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sphere1Config {
    pub degrees: Vec<usize>,
    pub caps_deg: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for Sphere1Config {
    fn default() -> Self {
        Self { degrees: (1..=5).collect(), caps_deg: vec![15.0, 30.0, 60.0, 90.0], trials: 2000, seed: 1 }
    }
}

/// Random disc unions tested against random Hermite expansions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaborConfig {
    pub corpus: usize,
    pub max_order: usize,
    pub windows: Vec<usize>,
    #[serde(rename = "R")]
    pub radius: f64,
    pub regions: usize,
    pub max_discs: usize,
    pub grid: PlaneGrid,
    pub seed: u64,
}

impl Default for GaborConfig {
    fn default() -> Self {
        Self { corpus: 50, max_order: 5, windows: vec![0, 1], radius: 1.0, regions: 3, max_discs: 3, grid: PlaneGrid::default(), seed: 1 }
    }
}

/// Random unions of pseudohyperbolic balls tested against random polynomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BergmanConfig {
    pub corpus: usize,
    pub max_degree: usize,
    pub alphas: Vec<f64>,
    pub radii: Vec<f64>,
    pub r_max: f64,
    pub cell: f64,
    pub regions: usize,
    pub max_balls: usize,
    pub seed: u64,
}

impl Default for BergmanConfig {
    fn default() -> Self {
        Self {
            corpus: 50,
            max_degree: 20,
            alphas: vec![2.0, 3.0],
            radii: vec![0.3, 0.5],
            r_max: 0.99,
            cell: 0.01,
            regions: 2,
            max_balls: 3,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BombieriConfig {
    pub trials: usize,
    pub lengths: Vec<usize>,
    pub measures: usize,
    pub max_points: usize,
    pub deltas: Vec<f64>,
    pub seed: u64,
}

impl Default for BombieriConfig {
    fn default() -> Self {
        Self { trials: 200, lengths: vec![1, 2, 4, 8, 16], measures: 20, max_points: 40, deltas: vec![0.05, 0.1, 0.25], seed: 1 }
    }
}

/// Residuals of both local reproducing identities under quadrature refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalrepConfig {
    pub points: usize,
    pub plane_windows: Vec<usize>,
    pub plane_radius: f64,
    pub plane_orders: Vec<usize>,
    pub plane_tol: f64,
    pub disc_alphas: Vec<f64>,
    pub disc_radius: f64,
    pub disc_orders: Vec<usize>,
    pub disc_tol: f64,
    pub seed: u64,
}

impl Default for LocalrepConfig {
    fn default() -> Self {
        Self {
            points: 10,
            plane_windows: vec![0, 1],
            plane_radius: 1.0,
            plane_orders: vec![4, 8, 16],
            plane_tol: 1e-3,
            disc_alphas: vec![2.0, 3.0],
            disc_radius: 0.5,
            disc_orders: vec![2, 4, 8],
            disc_tol: 1e-4,
            seed: 1,
        }
    }
}

/// A config for any suite; the variant must match the requested suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SuiteConfig {
    Pw(PwConfig),
    Sphere2(Sphere2Config),
    Sphere1(Sphere1Config),
    Gabor(GaborConfig),
    Bergman(BergmanConfig),
    Bombieri(BombieriConfig),
    Localrep(LocalrepConfig),
}

/// Flags that override config entries where the suite has them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyOverrides {
    pub seed: Option<u64>,
    pub degree: Option<usize>,
    pub cap_deg: Option<f64>,
    pub trials: Option<usize>,
}

fn parse<T: serde::de::DeserializeOwned + Default>(v: Option<Value>) -> CliResult<T> {
    match v {
        None => Ok(T::default()),
        Some(v) => serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string())),
    }
}

fn unsupported(suite: Suite, flag: &str) -> CliError {
    CliError::Config(format!("suite {} has no {flag} setting", suite.as_str()))
}

impl SuiteConfig {
    /// Parses the suite's config from JSON (defaults when absent) and applies flags.
    pub fn resolve(suite: Suite, raw: Option<Value>, o: &VerifyOverrides) -> CliResult<Self> {
        let mut cfg = match suite {
            Suite::Pw => SuiteConfig::Pw(parse(raw)?),
            Suite::Sphere2 => SuiteConfig::Sphere2(parse(raw)?),
            Suite::Sphere1 => SuiteConfig::Sphere1(parse(raw)?),
            Suite::Gabor => SuiteConfig::Gabor(parse(raw)?),
            Suite::Bergman => SuiteConfig::Bergman(parse(raw)?),
            Suite::Bombieri => SuiteConfig::Bombieri(parse(raw)?),
            Suite::Localrep => SuiteConfig::Localrep(parse(raw)?),
        };
        if let Some(s) = o.seed {
            match &mut cfg {
                SuiteConfig::Pw(c) => c.seed = s,
                SuiteConfig::Sphere2(c) => c.seed = s,
                SuiteConfig::Sphere1(c) => c.seed = s,
                SuiteConfig::Gabor(c) => c.seed = s,
                SuiteConfig::Bergman(c) => c.seed = s,
                SuiteConfig::Bombieri(c) => c.seed = s,
                SuiteConfig::Localrep(c) => c.seed = s,
            }
        }
        if let Some(l) = o.degree {
            match &mut cfg {
                SuiteConfig::Sphere2(c) => c.degrees = vec![l],
                SuiteConfig::Sphere1(c) => c.degrees = vec![l],
                _ => return Err(unsupported(suite, "--L")),
            }
        }
        if let Some(d) = o.cap_deg {
            match &mut cfg {
                SuiteConfig::Sphere2(c) => c.caps_deg = vec![d],
                SuiteConfig::Sphere1(c) => c.caps_deg = vec![d],
                _ => return Err(unsupported(suite, "--cap")),
            }
        }
        if let Some(t) = o.trials {
            match &mut cfg {
                SuiteConfig::Pw(c) => c.trials = t,
                SuiteConfig::Sphere1(c) => c.trials = t,
                SuiteConfig::Bombieri(c) => c.trials = t,
                SuiteConfig::Gabor(c) => c.corpus = t,
                SuiteConfig::Bergman(c) => c.corpus = t,
                _ => return Err(unsupported(suite, "--trials")),
            }
        }
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        match self {
            SuiteConfig::Pw(c) => c.seed,
            SuiteConfig::Sphere2(c) => c.seed,
            SuiteConfig::Sphere1(c) => c.seed,
            SuiteConfig::Gabor(c) => c.seed,
            SuiteConfig::Bergman(c) => c.seed,
            SuiteConfig::Bombieri(c) => c.seed,
            SuiteConfig::Localrep(c) => c.seed,
        }
    }
}

/// One checked case: an inequality `observed ≤ bound` (up to `eps`) over one
/// or more trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub case: String,
    pub observed: f64,
    pub bound: f64,
    pub margin: f64,
    pub eps: f64,
    pub trials: usize,
    pub violations: usize,
    pub holds: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
    #[serde(skip)]
    rows: Vec<(usize, f64, f64)>,
}

impl CaseResult {
    fn from_report(case: String, r: &ConcentrationReport) -> Self {
        Self {
            case,
            observed: r.observed,
            bound: r.bound,
            margin: r.margin,
            eps: r.eps_quad,
            trials: r.trials.len(),
            violations: r.violations(),
            holds: r.holds(),
            detail: Value::Null,
            rows: r.trials.iter().map(|t| (t.index, t.observed, t.bound)).collect(),
        }
    }

    fn single(case: String, observed: f64, bound: f64, eps: f64, detail: Value) -> Self {
        let margin = bound - observed;
        let holds = margin >= -eps;
        Self {
            case,
            observed,
            bound,
            margin,
            eps,
            trials: 1,
            violations: usize::from(!holds),
            holds,
            detail,
            rows: vec![(0, observed, bound)],
        }
    }
}

/// Runs a suite. Exit 1 iff some case is violated beyond its tolerance,
/// except `sphere1`, whose exceedances only raise `CONJECTURE-FLAG`.
pub fn run_verify(suite: Suite, cfg: &SuiteConfig) -> CliResult<Outcome> {
    let cases = match cfg {
        SuiteConfig::Pw(c) => pw_cases(c)?,
        SuiteConfig::Sphere2(c) => sphere2_cases(c)?,
        SuiteConfig::Sphere1(c) => sphere1_cases(c)?,
        SuiteConfig::Gabor(c) => gabor_cases(c)?,
        SuiteConfig::Bergman(c) => bergman_cases(c)?,
        SuiteConfig::Bombieri(c) => bombieri_cases(c)?,
        SuiteConfig::Localrep(c) => localrep_cases(c)?,
    };
    let failing: Vec<&CaseResult> = cases.iter().filter(|c| !c.holds).collect();
    let worst = cases.iter().min_by(|a, b| (a.margin + a.eps).total_cmp(&(b.margin + b.eps)));
    let mut result = json!({
        "suite": suite.as_str(),
        "cases": cases,
        "violations": cases.iter().map(|c| c.violations).sum::<usize>(),
        "holds": failing.is_empty(),
        "worst_offender": worst,
    });
    let exit_code = if suite == Suite::Sphere1 {
        result["CONJECTURE-FLAG"] = json!(!failing.is_empty());
        EXIT_OK
    } else if failing.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    let mut rows = vec![["case", "trial", "observed", "bound", "margin"].map(String::from).to_vec()];
    for c in &cases {
        for &(i, o, b) in &c.rows {
            rows.push(vec![c.case.clone(), i.to_string(), num(o), num(b), num(b - o)]);
        }
    }
    Ok(Outcome {
        command: format!("verify {}", suite.as_str()),
        seed: cfg.seed(),
        config: to_value(cfg),
        result,
        exit_code,
        csv: Some(rows),
    })
}

fn pw_cases(c: &PwConfig) -> CliResult<Vec<CaseResult>> {
    if c.n == 0 || c.max_size == 0 {
        return Err(CliError::Config("pw suite needs N > 0 and max_size > 0".into()));
    }
    (0..c.regions)
        .map(|i| {
            let mut rng = trial_rng(c.seed, i);
            let size = rng.random_range(1..=c.max_size.min(c.n));
            let omega: Vec<usize> = if i % 2 == 0 {
                sample(&mut rng, c.n, size).into_vec()
            } else {
                let start = rng.random_range(0..c.n);
                (0..size).map(|j| (start + j) % c.n).collect()
            };
            let report = verify_pw_sieve(c.trials, c.n, c.band, &omega, rng.random())?;
            let kind = if i % 2 == 0 { "scattered" } else { "block" };
            Ok(CaseResult::from_report(format!("region {i} {kind} |Omega|={size}"), &report))
        })
        .collect()
}

fn sphere2_cases(c: &Sphere2Config) -> CliResult<Vec<CaseResult>> {
    let mut out = Vec::new();
    for &l in &c.degrees {
        let b = compute_b_l(l)?;
        for &deg in &c.caps_deg {
            let omega = SphericalRegion::single_cap(Cap::polar_degrees(deg)?);
            let lambda = sphere_lambda2(&omega, l)?;
            let rho = rho_sphere(&omega, l, &c.density)?;
            out.push(CaseResult::single(
                format!("L={l} cap={deg}deg"),
                lambda,
                b * rho.value,
                c.tol,
                json!({ "B_L": b, "rho": rho.value, "rho_error": rho.error_estimate }),
            ));
        }
        let full = sphere_lambda2(&SphericalRegion::full(), l)?;
        out.push(CaseResult::single(format!("L={l} full sphere"), (full - 1.0).abs(), 0.0, c.full_tol, json!({ "lambda2": full })));
    }
    Ok(out)
}

fn sphere1_cases(c: &Sphere1Config) -> CliResult<Vec<CaseResult>> {
    let mut out = Vec::new();
    for (k, &l) in c.degrees.iter().enumerate() {
        for (j, &deg) in c.caps_deg.iter().enumerate() {
            let omega = SphericalRegion::single_cap(Cap::polar_degrees(deg)?);
            let seed = trial_rng(c.seed, k * c.caps_deg.len() + j).random();
            let r = sphere_lambda1_search(&omega, l, c.trials, seed)?;
            out.push(CaseResult::from_report(format!("L={l} cap={deg}deg"), &r));
        }
    }
    Ok(out)
}

fn random_disc_union<R: Rng>(rng: &mut R, max_discs: usize) -> CliResult<PlanarRegion> {
    let count = rng.random_range(1..=max_discs.max(1));
    let discs = (0..count)
        .map(|_| Disc { center: [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)], radius: rng.random_range(0.2..1.2) })
        .collect();
    Ok(PlanarRegion::discs(discs)?)
}

fn gabor_cases(c: &GaborConfig) -> CliResult<Vec<CaseResult>> {
    let corpus: Vec<HermiteExpansion> = (0..c.corpus)
        .map(|i| {
            let mut rng = trial_rng(c.seed, CORPUS_STREAM + i);
            let order = rng.random_range(0..=c.max_order);
            HermiteExpansion::new((0..=order).map(|_| complex_normal(&mut rng)).collect())
        })
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for i in 0..c.regions {
        let omega = random_disc_union(&mut trial_rng(c.seed, i), c.max_discs)?;
        for &r in &c.windows {
            let rep = verify_gabor_sieve(r, c.radius, &omega, &corpus, &c.grid)?;
            out.push(CaseResult::from_report(format!("region {i} r={r}"), &rep));
        }
    }
    Ok(out)
}

fn random_balls<R: Rng>(rng: &mut R, max_balls: usize) -> Vec<PseudoBall> {
    let count = rng.random_range(1..=max_balls.max(1));
    (0..count)
        .map(|_| {
            let z = Complex64::from_polar(0.8 * rng.random_range(0.0f64..1.0).sqrt(), rng.random_range(0.0..2.0 * PI));
            PseudoBall { center: [z.re, z.im], radius: rng.random_range(0.1..0.6) }
        })
        .collect()
}

fn bergman_cases(c: &BergmanConfig) -> CliResult<Vec<CaseResult>> {
    let corpus: Vec<Polynomial> = (0..c.corpus)
        .map(|i| {
            let mut rng = trial_rng(c.seed, CORPUS_STREAM + i);
            let degree = rng.random_range(0..=c.max_degree);
            Polynomial::new((0..=degree).map(|_| complex_normal(&mut rng)).collect())
        })
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for i in 0..c.regions {
        let balls = random_balls(&mut trial_rng(c.seed, i), c.max_balls);
        let omega = DiscRegion::from_balls(c.cell, c.r_max, &balls)?;
        for &alpha in &c.alphas {
            for &radius in &c.radii {
                let rep = verify_bergman_sieve(alpha, radius, &omega, &corpus)?;
                out.push(CaseResult::from_report(format!("region {i} alpha={alpha} R={radius}"), &rep));
            }
        }
    }
    Ok(out)
}

fn bombieri_cases(c: &BombieriConfig) -> CliResult<Vec<CaseResult>> {
    let mut out = Vec::new();
    for m in 0..c.measures {
        let mut rng = trial_rng(c.seed, m);
        let count = rng.random_range(1..=c.max_points.max(1));
        let mu = random_point_measure(&mut rng, count);
        for &n in &c.lengths {
            for &delta in &c.deltas {
                let rep = verify_bombieri(n, delta, &mu, c.trials, rng.random())?;
                out.push(CaseResult::from_report(format!("measure {m} points={count} n={n} delta={delta}"), &rep));
            }
        }
    }
    Ok(out)
}

/// Largest residual must fall below `tol` and never grow under refinement.
fn refinement_case(case: String, residuals: Vec<f64>, tol: f64) -> CaseResult {
    let monotone = residuals.windows(2).all(|w| w[1] <= w[0].max(1e-12));
    let last = *residuals.last().unwrap_or(&f64::INFINITY);
    let mut c = CaseResult::single(case, last, tol, 0.0, json!({ "residuals": residuals, "monotone": monotone }));
    if !monotone {
        c.holds = false;
        c.violations = 1;
    }
    c
}

fn localrep_cases(c: &LocalrepConfig) -> CliResult<Vec<CaseResult>> {
    if c.points == 0 || c.plane_orders.is_empty() || c.disc_orders.is_empty() {
        return Err(CliError::Config("localrep needs test points and quadrature orders".into()));
    }
    let mut out = Vec::new();
    for (k, &r) in c.plane_windows.iter().enumerate() {
        let mut rng = trial_rng(c.seed, k);
        let pts: Vec<Complex64> =
            (0..c.points).map(|_| Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))).collect();
        let order = rng.random_range(0..=3usize);
        let f = HermiteExpansion::new((0..=order).map(|_| complex_normal(&mut rng)).collect())?;
        let res = c
            .plane_orders
            .iter()
            .map(|&q| verify_local_reproducing_plane(r, c.plane_radius, &pts, &f, q))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(refinement_case(format!("plane r={r} R={}", c.plane_radius), res, c.plane_tol));
    }
    for (k, &alpha) in c.disc_alphas.iter().enumerate() {
        let mut rng = trial_rng(c.seed, CORPUS_STREAM + k);
        let pts: Vec<Complex64> = (0..c.points)
            .map(|_| Complex64::from_polar(0.85 * rng.random_range(0.0f64..1.0).sqrt(), rng.random_range(0.0..2.0 * PI)))
            .collect();
        let degree = rng.random_range(0..=6usize);
        let f = Polynomial::new((0..=degree).map(|_| complex_normal(&mut rng)).collect())?;
        let res = c
            .disc_orders
            .iter()
            .map(|&q| verify_local_reproducing_disc(alpha, c.disc_radius, &pts, &f, q))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(refinement_case(format!("disc alpha={alpha} R={}", c.disc_radius), res, c.disc_tol));
    }
    Ok(out)
}
