use serde_json::json;
use sievekit::recovery::{run_suite, ExperimentKind, SuiteConfig};

use crate::{num, to_value, CliResult, Outcome, EXIT_OK, EXIT_VIOLATION};

/// Runs a recovery suite. Exit 0 iff every instance that cleared the density
/// gate was recovered exactly; failures outside the gate are reported only.
pub fn run_recover(kind: ExperimentKind, cfg: &SuiteConfig) -> CliResult<Outcome> {
    let report = run_suite(kind, cfg)?;
    let mut rows = vec![["trial", "size", "rho", "gate_cleared", "error", "exact", "objective", "iterations", "converged"]
        .map(String::from)
        .to_vec()];
    for (i, t) in report.trials.iter().enumerate() {
        rows.push(vec![
            i.to_string(),
            t.omega.len().to_string(),
            num(t.rho),
            t.gate_cleared.to_string(),
            num(t.error),
            t.exact.to_string(),
            num(t.objective),
            t.iterations.to_string(),
            t.converged.to_string(),
        ]);
    }
    let failures: Vec<_> = report.trials.iter().enumerate().filter(|(_, t)| t.gate_cleared && !t.exact).map(|(i, _)| i).collect();
    let name = match kind {
        ExperimentKind::Logan => "logan",
        ExperimentKind::DonohoStark => "donoho-stark",
    };
    let result = json!({
        "kind": name,
        "summary": {
            "instances": report.trials.len(),
            "gated": report.gated,
            "gated_exact": report.gated_exact,
            "ungated": report.ungated,
            "ungated_exact": report.ungated_exact,
            "non_converged": report.non_converged,
            "guarantee_holds": report.guarantee_holds(),
            "gated_failures": failures,
        },
        "trials": report.trials.iter().map(|t| json!({
            "rho": t.rho,
            "gate_cleared": t.gate_cleared,
            "error": t.error,
            "iterations": t.iterations,
            "converged": t.converged,
            "omega": t.omega,
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        command: format!("recover {name}"),
        seed: cfg.seed,
        config: to_value(cfg),
        result,
        exit_code: if report.guarantee_holds() { EXIT_OK } else { EXIT_VIOLATION },
        csv: Some(rows),
    })
}
