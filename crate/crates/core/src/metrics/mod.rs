//! Distances between finite laws on the real line.

pub mod flow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::EmpiricalDistribution;

use flow::greedy_max_flow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricMethod {
    ClosedForm,
    BinarySearchFlow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub value: f64,
    pub method: MetricMethod,
    pub iterations: usize,
}

const LEVY_ITERATIONS: usize = 60;
const LEVY_TOL: f64 = 1e-12;
/// Slack on the transported mass absorbing rounding in the flow sums.
const FLOW_SLACK: f64 = 1e-12;

/// Whether `G(x) <= F(x + ε) + ε` and `F(x - ε) - ε <= G(x)` for all `x`.
///
/// Both sides are right-continuous step functions, so each inequality only
/// needs checking where one of its two sides jumps.
fn levy_feasible(f: &EmpiricalDistribution, g: &EmpiricalDistribution, eps: f64) -> bool {
    let upper_ok = |x: f64| g.cdf(x) <= f.cdf(x + eps) + eps;
    let lower_ok = |x: f64| f.cdf(x - eps) - eps <= g.cdf(x);
    g.values().iter().all(|&x| upper_ok(x) && lower_ok(x))
        && f.values().iter().all(|&v| upper_ok(v - eps) && lower_ok(v + eps))
}

/// Lévy distance `inf{ε : F(x-ε) - ε <= G(x) <= F(x+ε) + ε for all x}`.
pub fn levy_distance(d1: &EmpiricalDistribution, d2: &EmpiricalDistribution) -> MetricResult {
    if levy_feasible(d1, d2, 0.0) {
        return MetricResult { value: 0.0, method: MetricMethod::ClosedForm, iterations: 0 };
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut iterations = 0;
    while iterations < LEVY_ITERATIONS && hi - lo > LEVY_TOL {
        let mid = 0.5 * (lo + hi);
        if levy_feasible(d1, d2, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    MetricResult { value: hi, method: MetricMethod::ClosedForm, iterations }
}

/// Whether a coupling moves at most mass `ε` by more than `ε`, checked from both sides.
fn prohorov_feasible(d1: &EmpiricalDistribution, d2: &EmpiricalDistribution, eps: f64) -> bool {
    let need = 1.0 - eps - FLOW_SLACK;
    greedy_max_flow(d1.values(), d1.weights(), d2.values(), d2.weights(), eps) >= need
        && greedy_max_flow(d2.values(), d2.weights(), d1.values(), d1.weights(), eps) >= need
}

/// Prohorov distance via Strassen's theorem: `d_P <= ε` iff some coupling
/// has `P(|X - Y| > ε) <= ε`, i.e. iff the transport network restricted to
/// pairs within `ε` carries mass `1 - ε`. Bisection on `ε` stops when the
/// bracket is narrower than `tol` and returns its midpoint.
pub fn prohorov_distance(d1: &EmpiricalDistribution, d2: &EmpiricalDistribution, tol: f64) -> Result<MetricResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    if prohorov_feasible(d1, d2, 0.0) {
        return Ok(MetricResult { value: 0.0, method: MetricMethod::BinarySearchFlow, iterations: 1 });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut probes: Vec<(f64, bool)> = Vec::new();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let ok = prohorov_feasible(d1, d2, mid);
        probes.push((mid, ok));
        if ok {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let smallest_feasible = probes.iter().filter(|p| p.1).map(|p| p.0).fold(f64::INFINITY, f64::min);
    if let Some(&(e, _)) = probes.iter().find(|p| !p.1 && p.0 > smallest_feasible) {
        return Err(Error::Internal(format!("transport feasibility is not monotone: infeasible at {e}")));
    }
    Ok(MetricResult { value: 0.5 * (lo + hi), method: MetricMethod::BinarySearchFlow, iterations: probes.len() })
}

/// `d_P(μ, ν) + |∫ψ_p dμ - ∫ψ_p dν|` with `ψ_p(x) = |x|^p / p`.
pub fn perturbation_gap(d1: &EmpiricalDistribution, d2: &EmpiricalDistribution, p: f64, tol: f64) -> Result<f64> {
    let m1 = d1.psi_p_moment(p)?;
    let m2 = d2.psi_p_moment(p)?;
    Ok(prohorov_distance(d1, d2, tol)?.value + (m1 - m2).abs())
}
