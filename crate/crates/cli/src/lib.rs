//! Command implementations behind the `sievekit` binary.
//!
//! Every command resolves a typed config (file first, flags override), runs,
//! and returns an [`Outcome`]. [`Outcome::envelope`] wraps the result with the
//! tool version, seed, config hash and wall-clock record. Only the wall-clock
//! record varies between runs of the same config.

pub mod constants_cmd;
pub mod density_cmd;
pub mod recover_cmd;
pub mod verify_cmd;

use std::fmt;
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const TOOL_VERSION: &str = concat!("sievekit ", env!("CARGO_PKG_VERSION"));

/// Environment variable fixing the worker-pool size.
pub const THREADS_ENV: &str = "SIEVEKIT_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed configuration, or inconsistent flags.
    Config(String),
    /// The library rejected the parameters or failed to compute.
    Compute(sievekit::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<sievekit::Error> for CliError {
    fn from(e: sievekit::Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    /// All errors are usage or configuration failures from the caller's side.
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Result of one command, before wrapping.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: String,
    pub seed: u64,
    /// The fully resolved config; hashed into the envelope.
    pub config: Value,
    pub result: Value,
    pub exit_code: i32,
    /// Per-trial rows, header first.
    pub csv: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WallClock {
    pub started_unix: f64,
    pub elapsed_seconds: f64,
}

impl WallClock {
    pub fn measure(start: SystemTime, elapsed: Duration) -> Self {
        let started_unix = start.duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
        Self { started_unix, elapsed_seconds: elapsed.as_secs_f64() }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool_version: &'static str,
    command: &'a str,
    seed: u64,
    config_hash: String,
    config: &'a Value,
    result: &'a Value,
    exit_code: i32,
    wall_clock: Option<&'a WallClock>,
}

impl Outcome {
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(&self.config).expect("config serialises");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Pretty JSON of the envelope. With `wall_clock = None` the text is a pure
    /// function of the config and seed.
    pub fn envelope(&self, wall_clock: Option<&WallClock>) -> String {
        let env = Envelope {
            tool_version: TOOL_VERSION,
            command: &self.command,
            seed: self.seed,
            config_hash: self.config_hash(),
            config: &self.config,
            result: &self.result,
            exit_code: self.exit_code,
            wall_clock,
        };
        let mut s = serde_json::to_string_pretty(&env).expect("envelope serialises");
        s.push('\n');
        s
    }

    pub fn write_csv(&self, path: &Path) -> CliResult<()> {
        let rows = self.csv.as_ref().ok_or_else(|| CliError::Config(format!("{} produces no per-trial CSV", self.command)))?;
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.into()))?;
        for r in rows {
            w.write_record(r).map_err(|e| CliError::Io(e.into()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a JSON file; unknown keys are rejected by the target types.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// [`read_json`], or the default config when no file is given.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    path.map_or_else(|| Ok(T::default()), read_json)
}

pub(crate) fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("value serialises")
}

/// Thread count from the flag, else from [`THREADS_ENV`], else rayon's default.
pub fn resolve_threads(flag: Option<usize>) -> CliResult<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

/// Shortest round-trip rendering of a float.
pub(crate) fn num(x: f64) -> String {
    format!("{x:?}")
}
