//! Dual representation of TVaR- and expectation-based risk measures on
//! finite spaces: support functions, the dual feasible set, and dual
//! evaluation for cash and for a strictly positive random asset.
//!
//! `ρ_{A,S}(X) = sup{σ_A(ψ) - ψ(X) : ψ >= 0, ψ(S_T) = S_0}`. For TVaR the
//! supremum runs over densities `0 <= dQ/dP <= 1/α` and reduces to the
//! fractional program `sup_Q S_0 E_Q[-X] / E_Q[S_T]`, solved here by
//! Dinkelbach iteration with a greedy linear oracle.

use crate::error::{Error, Result};
use crate::riskcore::{AcceptanceSpec, ExtendedReal, TradedAsset};
use crate::scenario::ScenarioSpace;

const MEMBERSHIP_TOL: f64 = 1e-10;
const DINKELBACH_MAX_ITER: usize = 200;

/// Dual feasible set of the TVaR acceptance set at level `alpha` for an
/// asset with price `s0` and statewise payoff `payoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSet {
    pub probs: Vec<f64>,
    pub payoff: Vec<f64>,
    pub s0: f64,
    pub alpha: f64,
}

impl DualSet {
    pub fn tvar(space: &ScenarioSpace, asset: &TradedAsset, alpha: f64) -> Result<Self> {
        check_level(alpha)?;
        Ok(DualSet { probs: space.probs().to_vec(), payoff: asset.payoff_vector(space)?, s0: asset.price_s0, alpha })
    }

    /// `ψ >= 0`, `Σ ψ_i S_i = S_0`, and `ψ / Σψ` bounded by `p / α`.
    pub fn contains(&self, psi: &[f64]) -> bool {
        if psi.len() != self.probs.len() || psi.iter().any(|v| !(v.is_finite() && *v >= -MEMBERSHIP_TOL)) {
            return false;
        }
        let priced: f64 = psi.iter().zip(&self.payoff).map(|(a, b)| a * b).sum();
        if (priced - self.s0).abs() > MEMBERSHIP_TOL * self.s0.max(1.0) {
            return false;
        }
        let mass: f64 = psi.iter().sum();
        psi.iter().zip(&self.probs).all(|(v, p)| *v <= mass * p / self.alpha + MEMBERSHIP_TOL * mass.max(1.0))
    }

    /// The element `c·q` associated with a probability vector `q` of the set.
    pub fn scale(&self, q: &[f64]) -> Vec<f64> {
        let priced: f64 = q.iter().zip(&self.payoff).map(|(a, b)| a * b).sum();
        q.iter().map(|v| v * self.s0 / priced).collect()
    }
}

fn check_level(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::BadLevel(alpha))
    }
}

/// `σ_A(ψ) = inf_{A ∈ A} ψ(A)` for the TVaR and expectation acceptance sets.
pub fn support_function(acc: &AcceptanceSpec, psi: &[f64], space: &ScenarioSpace) -> Result<ExtendedReal> {
    let probs = space.probs();
    if psi.len() != probs.len() {
        return Err(Error::DimensionMismatch { expected: probs.len(), got: psi.len() });
    }
    if let Some(v) = psi.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::BadParameters(format!("support function needs psi >= 0, got {v}")));
    }
    acc.validate()?;
    let mass: f64 = psi.iter().sum();
    let slack = MEMBERSHIP_TOL * mass.max(1.0);
    match acc {
        AcceptanceSpec::TVaRLevel { alpha } => {
            let inside = psi.iter().zip(probs).all(|(v, p)| *v <= mass * p / alpha + slack);
            Ok(if inside { ExtendedReal::Finite(0.0) } else { ExtendedReal::MinusInfinity })
        }
        AcceptanceSpec::ExpectationFloor { alpha } => {
            let proportional = psi.iter().zip(probs).all(|(v, p)| (v - mass * p).abs() <= slack);
            Ok(if proportional { ExtendedReal::Finite(alpha * mass) } else { ExtendedReal::MinusInfinity })
        }
        other => Err(Error::UnsupportedSpec(format!("support function is only available for TVaR and expectation sets, got {other:?}"))),
    }
}

/// Probability vector maximizing `E_Q[score]` subject to `Q <= P / α`:
/// states are filled with mass `p_i / α` in decreasing order of score.
pub fn greedy_worst_density(probs: &[f64], score: &[f64], alpha: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&i, &j| score[j].total_cmp(&score[i]));
    let mut q = vec![0.0; probs.len()];
    let mut left = 1.0;
    for i in order {
        if left <= 0.0 {
            break;
        }
        let take = (probs[i] / alpha).min(left);
        q[i] = take;
        left -= take;
    }
    q
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `max{E_Q[-X] : 0 <= dQ/dP <= 1/α}`, which equals `TVaR_α(X)`.
pub fn dual_eval_tvar_cash(space: &ScenarioSpace, var: &str, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    let x = space.var(var)?;
    let loss: Vec<f64> = x.iter().map(|v| -v).collect();
    let q = greedy_worst_density(space.probs(), &loss, alpha);
    Ok(dot(&q, &loss))
}

/// `sup_Q S_0 E_Q[-X] / E_Q[S_T]` over `0 <= dQ/dP <= 1/α`, by Dinkelbach iteration.
pub fn dual_eval_tvar_asset(
    space: &ScenarioSpace,
    var: &str,
    asset: &TradedAsset,
    alpha: f64,
    tol: f64,
) -> Result<f64> {
    check_level(alpha)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    let x = space.var(var)?;
    let s = asset.payoff_vector(space)?;
    if s.iter().any(|v| *v <= 0.0) {
        return Err(Error::NonPositivePayoff);
    }
    let s0 = asset.price_s0;
    let loss: Vec<f64> = x.iter().map(|v| -s0 * v).collect();
    let ratio = |q: &[f64]| dot(q, &loss) / dot(q, &s);

    let mut t = ratio(space.probs());
    for _ in 0..DINKELBACH_MAX_ITER {
        let score: Vec<f64> = loss.iter().zip(&s).map(|(l, si)| l - t * si).collect();
        let q = greedy_worst_density(space.probs(), &score, alpha);
        let next = ratio(&q);
        if next < t - 1e-12 * t.abs().max(1.0) {
            return Err(Error::Internal(format!("Dinkelbach iterates decreased from {t} to {next}")));
        }
        if (next - t).abs() < tol {
            return Ok(next.max(t));
        }
        t = next;
    }
    Err(Error::NoConvergence(DINKELBACH_MAX_ITER))
}
