//! Monte Carlo experiments on the qualitative robustness of plug-in
//! risk estimators, and the `L^p` continuity probe.
//!
//! Every replication draws from its own counter-based stream, so results
//! depend on the configuration only, never on thread scheduling.

mod probe;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::{format_float, to_canonical_json};
use crate::error::{Error, Result};
use crate::metrics::{perturbation_gap, prohorov_distance};
use crate::riskcore::{cash_risk, AcceptanceSpec, ExtendedReal};
use crate::scenario::rng::derive_seed;
use crate::scenario::{sample, sample_stream, DistributionSpec, EmpiricalDistribution};

pub use probe::lp_continuity_probe;

/// Atom recorded for an estimate of `+∞` (and its negative for `-∞`).
pub const OVERFLOW_SENTINEL: f64 = 1e15;
pub const DEFAULT_N_REF: usize = 100_000;

const MIN_N: usize = 10;
const MIN_REPS: usize = 50;

// Labels for derived sub-seeds.
const LABEL_MU: u64 = 1;
const LABEL_NU: u64 = 2;
const LABEL_REF_MU: u64 = 3;
const LABEL_REF_NU: u64 = 4;

fn default_n_ref() -> usize {
    DEFAULT_N_REF
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub acc: AcceptanceSpec,
    pub base: DistributionSpec,
    pub contaminant: DistributionSpec,
    pub epsilons: Vec<f64>,
    pub n: usize,
    pub reps: usize,
    pub p: f64,
    pub seed: u64,
    pub tol: f64,
    /// Size of the reference samples used for admissibility gaps.
    #[serde(default = "default_n_ref")]
    pub n_ref: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.acc.validate()?;
        self.base.validate()?;
        self.contaminant.validate()?;
        if self.n < MIN_N {
            return Err(Error::BadParameters(format!("sample size n must be at least {MIN_N}, got {}", self.n)));
        }
        if self.reps < MIN_REPS {
            return Err(Error::BadParameters(format!("reps must be at least {MIN_REPS}, got {}", self.reps)));
        }
        if self.n_ref == 0 {
            return Err(Error::BadCount(0));
        }
        if !self.base.is_bounded() {
            return Err(Error::BadParameters("base law must be bounded (use a truncated law)".into()));
        }
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::BadExponent(self.p));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::BadTolerance(self.tol));
        }
        if self.epsilons.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(&e) = self.epsilons.iter().find(|e| !(0.0..1.0).contains(*e)) {
            return Err(Error::BadEpsilon(e));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub eps: f64,
    /// `d_P(μ, ν) + |∫ψ_p dμ - ∫ψ_p dν|` on the reference samples.
    pub gap: f64,
    /// Prohorov distance between the estimator laws under `μ` and `ν`.
    pub dp_distance: f64,
    pub mean_mu: f64,
    pub mean_nu: f64,
    pub spread_mu: f64,
    pub spread_nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSeeds {
    pub estimator_mu: u64,
    pub estimator_nu: u64,
    pub reference_mu: u64,
    pub reference_nu: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub config: ExperimentConfig,
    pub seeds: ReportSeeds,
    pub rows: Vec<RobustnessRow>,
}

impl RobustnessReport {
    pub fn to_canonical_json(&self) -> Result<String> {
        to_canonical_json(self)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,gap,dp_distance,mean_mu,mean_nu,spread_mu,spread_nu\n");
        for r in &self.rows {
            let fields = [r.eps, r.gap, r.dp_distance, r.mean_mu, r.mean_nu, r.spread_mu, r.spread_nu];
            out.push_str(&fields.map(format_float).join(","));
            out.push('\n');
        }
        out
    }
}

/// `(1 - ε) base + ε contaminant`.
pub fn contaminate(base: &DistributionSpec, eps: f64, contaminant: &DistributionSpec) -> Result<DistributionSpec> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::BadEpsilon(eps));
    }
    if eps == 0.0 {
        return Ok(base.clone());
    }
    let mixture = DistributionSpec::Mixture { components: vec![(1.0 - eps, base.clone()), (eps, contaminant.clone())] };
    mixture.validate()?;
    Ok(mixture)
}

fn estimate_value(v: ExtendedReal) -> f64 {
    match v {
        ExtendedReal::Finite(x) => x,
        ExtendedReal::PlusInfinity => OVERFLOW_SENTINEL,
        ExtendedReal::MinusInfinity => -OVERFLOW_SENTINEL,
    }
}

/// Plug-in estimates of the cash-additive risk for `reps` independent
/// samples of size `n`, in replication order.
pub fn estimates(acc: &AcceptanceSpec, spec: &DistributionSpec, n: usize, reps: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::BadCount(n));
    }
    if reps == 0 {
        return Err(Error::BadCount(reps));
    }
    acc.validate()?;
    spec.validate()?;
    (0..reps as u64)
        .into_par_iter()
        .map(|r| Ok(estimate_value(cash_risk(&sample_stream(spec, n, seed, r)?, acc)?)))
        .collect()
}

/// Law of the plug-in estimator `R_A(m_n)`: one atom of weight `1/reps` per replication.
pub fn estimator_law(
    acc: &AcceptanceSpec,
    spec: &DistributionSpec,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    EmpiricalDistribution::uniform(&estimates(acc, spec, n, reps, seed)?)
}

fn mean_and_spread(d: &EmpiricalDistribution) -> (f64, f64) {
    let m = d.mean();
    let var: f64 = d.atoms().map(|(v, w)| w * (v - m).powi(2)).sum();
    (m, var.sqrt())
}

/// Runs the contamination experiment for every `ε` of the configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RobustnessReport> {
    config.validate()?;
    let seeds = ReportSeeds {
        estimator_mu: derive_seed(config.seed, LABEL_MU),
        estimator_nu: derive_seed(config.seed, LABEL_NU),
        reference_mu: derive_seed(config.seed, LABEL_REF_MU),
        reference_nu: derive_seed(config.seed, LABEL_REF_NU),
    };
    let law_mu = estimator_law(&config.acc, &config.base, config.n, config.reps, seeds.estimator_mu)?;
    let (mean_mu, spread_mu) = mean_and_spread(&law_mu);
    let ref_mu = sample(&config.base, config.n_ref, seeds.reference_mu)?;

    let mut epsilons = config.epsilons.clone();
    epsilons.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(epsilons.len());
    for eps in epsilons {
        let nu = contaminate(&config.base, eps, &config.contaminant)?;
        let ref_nu = sample(&nu, config.n_ref, seeds.reference_nu)?;
        let gap = perturbation_gap(&ref_mu, &ref_nu, config.p, config.tol)?;
        let law_nu = estimator_law(&config.acc, &nu, config.n, config.reps, seeds.estimator_nu)?;
        let dp_distance = prohorov_distance(&law_mu, &law_nu, config.tol)?.value;
        let (mean_nu, spread_nu) = mean_and_spread(&law_nu);
        rows.push(RobustnessRow { eps, gap, dp_distance, mean_mu, mean_nu, spread_mu, spread_nu });
    }
    Ok(RobustnessReport { config: config.clone(), seeds, rows })
}
