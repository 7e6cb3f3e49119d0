use anyhow::Context;
use serde_json::{json, Value};

use ghzbell::ghz::{
    build_q_tensor, build_settings, norm_sq_closed_form, q_closed_form, tensor_entry_sum, tensor_norm_sq,
};
use ghzbell::lhv::{lhv_bound, max_s_brute, max_s_factorized, violation_factor, BRUTE_MAX_PARTIES};
use ghzbell::sim::{
    run_experiment, simulate_records, visibility_sweep, write_records, ExperimentConfig, ExperimentSummary,
    SettingPolicy, Tally,
};
use ghzbell::thresholds::threshold_table;
use ghzbell::verify::{run_checks, VerifyOptions};
use ghzbell::Exec;

use crate::render::{render, Table};
use crate::{Command, Format, Method, Policy};

/// Largest N for which `bound` reports norms from the explicit tensor.
const TENSOR_MAX_PARTIES: usize = 12;

pub enum CliError {
    Usage(String),
    Failure(anyhow::Error),
}

impl From<ghzbell::Error> for CliError {
    fn from(e: ghzbell::Error) -> Self {
        match e {
            ghzbell::Error::InvalidArgument(m) => CliError::Usage(m),
            other => CliError::Failure(other.into()),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

pub struct Outcome {
    pub text: String,
    pub success: bool,
}

pub fn run(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Bound { n, method, format } => bound(n as usize, method, format),
        Command::Thresholds { n_max, format } => thresholds(n_max as usize, format),
        Command::Simulate { n, v, eta, trials, seed, policy, records, format } => {
            let policy = match policy {
                Policy::RoundRobin => SettingPolicy::RoundRobin,
                Policy::UniformRandom => SettingPolicy::UniformRandom,
            };
            let config = ExperimentConfig::new(n as usize, v, eta, trials, seed)?.with_policy(policy);
            simulate(&config, records.as_deref(), format)
        }
        Command::Sweep { n, eta, v_grid, trials, seed, format } => sweep(n as usize, eta, &v_grid, trials, seed, format),
        Command::Verify { n_max, inject_fault, format } => verify(n_max as usize, inject_fault, format),
    }
}

fn emit(value: Value, format: Format, table: Option<Table>, success: bool) -> Result<Outcome, CliError> {
    let text = render(&value, format, table).map_err(CliError::Usage)?;
    Ok(Outcome { text, success })
}

fn bound(n: usize, method: Method, format: Format) -> Result<Outcome, CliError> {
    if method != Method::Factorized && n > BRUTE_MAX_PARTIES {
        return Err(CliError::Usage(format!(
            "--method brute needs --n <= {BRUTE_MAX_PARTIES}; use --method factorized"
        )));
    }
    let (norm_sq, q_n, source) = if n <= TENSOR_MAX_PARTIES {
        let q = build_q_tensor(&build_settings(n)?);
        (tensor_norm_sq(&q), tensor_entry_sum(&q), "tensor")
    } else {
        (norm_sq_closed_form(n), q_closed_form(n), "closed_form")
    };
    let mut out = json!({
        "n": n,
        "method": format!("{method:?}").to_lowercase(),
        "bound": lhv_bound(n),
        "norm_sq": norm_sq,
        "q_n": q_n,
        "norms_from": source,
        "violation_factor": violation_factor(n),
    });
    let mut success = true;
    if method != Method::Factorized {
        let brute = max_s_brute(n, Exec::Parallel)?;
        out["max_s"] = json!(brute.max_s);
        out["argmax"] = json!(brute.argmax);
        out["maximizer_count"] = json!(brute.maximizer_count);
    }
    if method != Method::Brute {
        let dp = max_s_factorized(n)?;
        out["log2_max_s"] = json!(dp.log2_max_s);
        if method == Method::Factorized {
            out["max_s"] = json!(dp.max_s);
            out["argmax"] = json!(dp.argmax);
        } else {
            out["max_s_factorized"] = json!(dp.max_s);
            out["argmax_factorized"] = json!(dp.argmax);
            let agree = (out["max_s"].as_f64().unwrap_or(f64::NAN) - dp.max_s).abs() < 1e-9;
            out["agree"] = json!(agree);
            success = agree;
        }
    }
    emit(out, format, None, success)
}

fn thresholds(n_max: usize, format: Format) -> Result<Outcome, CliError> {
    let rows = threshold_table(n_max)?;
    let value = json!({ "n_max": n_max, "rows": rows });
    emit(value, format, Some(Table::Thresholds), true)
}

fn simulate(config: &ExperimentConfig, records: Option<&std::path::Path>, format: Format) -> Result<Outcome, CliError> {
    let summary = match records {
        Some(path) => {
            let recs = simulate_records(config, Exec::Parallel)?;
            let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_records(std::io::BufWriter::new(file), &recs)
                .with_context(|| format!("writing {}", path.display()))?;
            ExperimentSummary::from_tally(&Tally::from_records(config.n_parties, &recs)?, config)?
        }
        None => run_experiment(config, Exec::Parallel)?,
    };
    let value = serde_json::to_value(&summary).context("serializing summary")?;
    emit(value, format, None, true)
}

fn sweep(n: usize, eta: f64, grid: &[f64], trials: u64, seed: u64, format: Format) -> Result<Outcome, CliError> {
    let points = visibility_sweep(n, eta, grid, trials, seed, Exec::Parallel)?;
    let value = json!({ "n": n, "eta": eta, "trials_per_point": trials, "seed": seed, "points": points });
    emit(value, format, Some(Table::Sweep), true)
}

fn verify(n_max: usize, inject_fault: Option<String>, format: Format) -> Result<Outcome, CliError> {
    let opts = VerifyOptions { brute_n_max: n_max, inject_fault, exec: Exec::Parallel };
    let checks = run_checks(&opts)?;
    let passed = checks.iter().all(|c| c.passed);
    let value = json!({ "passed": passed, "checks": checks });
    emit(value, format, Some(Table::Verify), passed)
}
