use serde::{Deserialize, Serialize};
use serde_json::json;
use sievekit::constants::{b_limit, compute_b_l, sieve_constant, ConstantName, ConstantParams};

use crate::{num, to_value, CliError, CliResult, Outcome, EXIT_OK};

/// Constants that need no parameters; the default selection.
const PARAMETER_FREE: [ConstantName; 5] =
    [ConstantName::PwBound, ConstantName::PwThreshold, ConstantName::BLimit, ConstantName::ARoot, ConstantName::L1SphereFactor];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsConfig {
    pub names: Vec<String>,
    pub params: ConstantParams,
}

/// Evaluates each named constant into `{name, parameters, value, method}`.
pub fn run_constants(cfg: &ConstantsConfig) -> CliResult<Outcome> {
    let names: Vec<ConstantName> = if cfg.names.is_empty() {
        PARAMETER_FREE.to_vec()
    } else {
        cfg.names.iter().map(|n| ConstantName::parse(n)).collect::<Result<_, _>>()?
    };
    let records = names.iter().map(|&n| sieve_constant(n, &cfg.params)).collect::<Result<Vec<_>, _>>()?;
    Ok(Outcome {
        command: "constants".into(),
        seed: 0,
        config: to_value(cfg),
        result: json!({ "constants": records }),
        exit_code: EXIT_OK,
        csv: None,
    })
}

/// Parses `a..b` (inclusive) or a single degree.
pub fn parse_degree_range(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Config(format!("expected a degree or an inclusive range a..b, got '{s}'"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim_start_matches('=').trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// CSV of `L, B_L, B_limit` for `L` in `lo..=hi`.
pub fn b_l_table(lo: usize, hi: usize) -> CliResult<String> {
    let limit = b_limit();
    let mut out = String::from("L,B_L,B_limit\n");
    for l in lo..=hi {
        out.push_str(&format!("{l},{},{}\n", num(compute_b_l(l)?), num(limit)));
    }
    Ok(out)
}
