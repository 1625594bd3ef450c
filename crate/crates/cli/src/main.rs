use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sievekit::constants::ConstantParams;
use sievekit::recovery::{ExperimentKind, SuiteConfig};
use sievekit_cli::constants_cmd::{b_l_table, parse_degree_range, run_constants, ConstantsConfig};
use sievekit_cli::density_cmd::{run_density, RegionSpec};
use sievekit_cli::recover_cmd::run_recover;
use sievekit_cli::verify_cmd::{run_verify, Suite, SuiteConfig as VerifyConfig, VerifyOverrides};
use sievekit_cli::{load_config, read_json, resolve_threads, CliError, CliResult, Outcome, WallClock};

#[derive(Parser)]
#[command(name = "sievekit", version, about = "Large-sieve constants, Nyquist densities, concentration checks and L1 recovery")]
struct Cli {
    /// Worker threads (overrides SIEVEKIT_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON envelope here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate named constants, or print the B_L table as CSV.
    Constants(ConstantsArgs),
    /// Maximum Nyquist density of a region file.
    Density {
        /// JSON region file tagged by "geometry".
        region: PathBuf,
    },
    /// Run a concentration-inequality suite.
    Verify(VerifyArgs),
    /// Run a seeded recovery suite.
    Recover(RecoverArgs),
}

#[derive(Args)]
struct ConstantsArgs {
    /// Constant name (repeatable): pw_bound, pw_threshold, B_L, B_limit, A,
    /// l1_sphere_factor, C_r, gabor_threshold, C_alpha.
    #[arg(long = "name")]
    names: Vec<String>,
    /// Degree L, or an inclusive range a..b with --table.
    #[arg(long = "L")]
    degree: Option<String>,
    /// Hermite window order.
    #[arg(long = "r")]
    order: Option<usize>,
    #[arg(long = "R")]
    radius: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "W")]
    bandwidth: Option<f64>,
    /// Emit a CSV table; only B_L is tabulated.
    #[arg(long)]
    table: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    suite: Suite,
    /// JSON config for the suite; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Spherical degree (sphere suites).
    #[arg(long = "L")]
    degree: Option<usize>,
    /// Polar cap angle in degrees (sphere suites).
    #[arg(long)]
    cap: Option<f64>,
    /// Trial or corpus count.
    #[arg(long)]
    trials: Option<usize>,
    /// Per-trial CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecoverKind {
    Logan,
    DonohoStark,
}

#[derive(Args)]
struct RecoverArgs {
    kind: RecoverKind,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    band: Option<usize>,
    /// Fixed |Omega| for every instance.
    #[arg(long)]
    erase: Option<usize>,
    /// Contiguous noise block of about this density instead of gated sets.
    #[arg(long = "rho-target")]
    rho_target: Option<f64>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn constants(a: ConstantsArgs, output: Option<&Path>) -> CliResult<Option<Outcome>> {
    if let Some(table) = a.table {
        if !table.eq_ignore_ascii_case("B_L") {
            return Err(CliError::Config(format!("only B_L can be tabulated, got '{table}'")));
        }
        let (lo, hi) = parse_degree_range(a.degree.as_deref().unwrap_or("1..200"))?;
        let csv = b_l_table(lo, hi)?;
        match output {
            Some(p) => std::fs::write(p, csv)?,
            None => print!("{csv}"),
        }
        return Ok(None);
    }
    let l = match a.degree.as_deref() {
        Some(s) => match parse_degree_range(s)? {
            (lo, hi) if lo == hi => Some(lo),
            _ => return Err(CliError::Config("a degree range needs --table B_L".into())),
        },
        None => None,
    };
    let params = ConstantParams { l, r: a.order, radius: a.radius, alpha: a.alpha, bandwidth: a.bandwidth };
    run_constants(&ConstantsConfig { names: a.names, params }).map(Some)
}

fn verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let raw = match &a.config {
        Some(p) => Some(read_json::<serde_json::Value>(p)?),
        None => None,
    };
    let overrides = VerifyOverrides { seed: a.seed, degree: a.degree, cap_deg: a.cap, trials: a.trials };
    let cfg = VerifyConfig::resolve(a.suite, raw, &overrides)?;
    run_verify(a.suite, &cfg)
}

fn recover(a: &RecoverArgs) -> CliResult<Outcome> {
    let mut cfg: SuiteConfig = load_config(a.config.as_deref())?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(b) = a.band {
        cfg.band = b;
    }
    if let Some(e) = a.erase {
        cfg.size = Some(e);
    }
    if let Some(r) = a.rho_target {
        cfg.rho_target = Some(r);
    }
    if let Some(i) = a.instances {
        cfg.instances = i;
    }
    let kind = match a.kind {
        RecoverKind::Logan => ExperimentKind::Logan,
        RecoverKind::DonohoStark => ExperimentKind::DonohoStark,
    };
    run_recover(kind, &cfg)
}

fn run(cli: Cli) -> CliResult<i32> {
    if let Some(n) = resolve_threads(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let started = SystemTime::now();
    let clock = Instant::now();
    let output = cli.output.as_deref();
    let (outcome, csv) = match cli.command {
        Command::Constants(a) => match constants(a, output)? {
            Some(o) => (o, None),
            None => return Ok(0),
        },
        Command::Density { region } => (run_density(&read_json::<RegionSpec>(&region)?)?, None),
        Command::Verify(a) => (verify(&a)?, a.csv),
        Command::Recover(a) => (recover(&a)?, a.csv),
    };
    let wall = WallClock::measure(started, clock.elapsed());
    let text = outcome.envelope(Some(&wall));
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    if let Some(p) = csv {
        outcome.write_csv(&p)?;
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("sievekit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
