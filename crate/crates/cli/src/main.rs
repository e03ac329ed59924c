//! `riskindex` command-line front end.
//!
//! Exit status: 0 on success, 1 when a computation fails (or the
//! counterexample inequality does not hold), 2 on bad flags or unreadable
//! input files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use riskindex::canonical::to_canonical_json;
use riskindex::indices::{index_of_finiteness, index_of_qualitative_robustness};
use riskindex::metrics::{levy_distance, perturbation_gap, prohorov_distance};
use riskindex::riskcore::{
    default_tolerance, eval_risk, reproduce_counterexample, reproduce_counterexample_cash, AcceptanceSpec,
    CounterexampleParams, TradedAsset,
};
use riskindex::robustlab::{lp_continuity_probe, run_experiment, ExperimentConfig};
use riskindex::scenario::{EmpiricalDistribution, ScenarioSpace};
use riskindex::Error;

#[derive(Parser)]
#[command(name = "riskindex", version, about = "Risk measures with general eligible assets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricKind {
    Levy,
    Prohorov,
}

#[derive(Subcommand)]
enum Command {
    /// Capital requirement of a scenario variable.
    Eval {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        var: String,
        #[arg(long)]
        acceptance: PathBuf,
        /// Scenario column holding the asset payoff; cash when omitted.
        #[arg(long, requires = "asset_price")]
        asset_payoff: Option<String>,
        #[arg(long, requires = "asset_payoff")]
        asset_price: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Index of finiteness and index of qualitative robustness.
    Index {
        #[arg(long)]
        acceptance: PathBuf,
    },
    /// Distance between the empirical laws of two one-column sample files.
    Metric {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum)]
        metric: MetricKind,
        /// Also report the admissibility gap with this moment exponent.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Contamination experiment; writes report.json and report.csv.
    Robustness {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Same-law positions with different capital requirements.
    Counterexample {
        #[arg(long, default_value_t = 1.0)]
        gamma1: f64,
        #[arg(long, default_value_t = 2.0)]
        gamma2: f64,
        #[arg(long, default_value_t = -1.5, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0.2)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        s0: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Use the cash asset instead of the random one.
        #[arg(long)]
        cash: bool,
    },
    /// Risk along a sequence of positions shrinking to zero in L^p.
    Probe {
        #[arg(long)]
        acceptance: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 16, 64, 256, 1024, 4096])]
        n: Vec<usize>,
    },
}

/// Failure category, mapped to the exit status.
enum Failure {
    Input(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn input_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_err(path, e))
}

fn read_acceptance(path: &Path) -> Result<AcceptanceSpec, Failure> {
    AcceptanceSpec::from_json(&read_text(path)?).map_err(|e| input_err(path, e))
}

fn read_samples(path: &Path) -> Result<EmpiricalDistribution, Failure> {
    let text = read_text(path)?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            // A non-numeric first line is a header.
            Err(_) if i == 0 => {}
            Err(_) => return Err(input_err(path, format!("line {}: cannot parse `{field}`", i + 1))),
        }
    }
    EmpiricalDistribution::uniform(&values).map_err(|e| input_err(path, e))
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    println!("{}", to_canonical_json(value)?);
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("RISKINDEX_THREADS") else {
        return Ok(());
    };
    let n: usize =
        raw.trim().parse().map_err(|_| Failure::Input(format!("RISKINDEX_THREADS must be a count, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Compute(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Eval { scenario, var, acceptance, asset_payoff, asset_price, tol } => {
            let space = ScenarioSpace::from_csv_path(&scenario).map_err(|e| input_err(&scenario, e))?;
            let acc = read_acceptance(&acceptance)?;
            for name in std::iter::once(&var).chain(asset_payoff.as_ref()) {
                space.var(name).map_err(|e| Failure::Input(e.to_string()))?;
            }
            let asset = match (asset_payoff, asset_price) {
                (Some(name), Some(price)) => TradedAsset::new(price, name),
                _ => TradedAsset::cash(),
            };
            let scale = space.var(&var)?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let tol = tol.unwrap_or_else(|| default_tolerance(scale));
            print_json(&eval_risk(&space, &var, &asset, &acc, tol)?)?;
        }
        Command::Index { acceptance } => {
            let acc = read_acceptance(&acceptance)?;
            let out = json!({
                "finiteness": index_of_finiteness(&acc)?,
                "robustness": index_of_qualitative_robustness(&acc)?,
            });
            print_json(&out)?;
        }
        Command::Metric { a, b, metric, p, tol } => {
            let (da, db) = (read_samples(&a)?, read_samples(&b)?);
            let result = match metric {
                MetricKind::Levy => levy_distance(&da, &db),
                MetricKind::Prohorov => prohorov_distance(&da, &db, tol)?,
            };
            let mut out = serde_json::to_value(result).map_err(Error::from)?;
            if let (Some(p), Value::Object(map)) = (p, &mut out) {
                map.insert("perturbation_gap".into(), json!(perturbation_gap(&da, &db, p, tol)?));
            }
            print_json(&out)?;
        }
        Command::Robustness { config, out } => {
            let cfg = ExperimentConfig::from_json(&read_text(&config)?).map_err(|e| input_err(&config, e))?;
            let report = run_experiment(&cfg)?;
            fs::create_dir_all(&out).map_err(|e| input_err(&out, e))?;
            let mut json = report.to_canonical_json()?;
            json.push('\n');
            fs::write(out.join("report.json"), json).map_err(|e| Failure::Compute(e.to_string()))?;
            fs::write(out.join("report.csv"), report.to_csv()).map_err(|e| Failure::Compute(e.to_string()))?;
        }
        Command::Counterexample { gamma1, gamma2, lambda, alpha, p, s0, tol, cash } => {
            let params = CounterexampleParams { gamma1, gamma2, lambda, alpha, p, s0, tol };
            let record =
                if cash { reproduce_counterexample_cash(&params)? } else { reproduce_counterexample(&params)? };
            print_json(&record)?;
            if !cash && !(record.same_law && record.inequality_holds) {
                eprintln!("error: expected same laws and rho_x > s0 >= rho_y");
                return Ok(ExitCode::from(1));
            }
        }
        Command::Probe { acceptance, p, n } => {
            let acc = read_acceptance(&acceptance)?;
            let rows: Vec<Value> = lp_continuity_probe(&acc, p, &n)?
                .into_iter()
                .zip(&n)
                .map(|((norm, rho), n)| json!({ "n": n, "lp_norm": norm, "rho": rho }))
                .collect();
            print_json(&rows)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // Clap exits with status 2 on flag errors.
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(cli));
    match result {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
