//! The capital-requirement engine `ρ_{A,S}(X) = inf{m : X + (m/S_0) S_T ∈ A}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{DistributionSpec, EmpiricalDistribution, ScenarioSpace};

use super::evaluators::acceptable;
use super::spec::{AcceptanceSpec, ExtendedReal};

/// Largest capital amount probed before declaring `±∞`.
pub const M_MAX: f64 = 1e12;

/// Default bisection width `1e-9 · max(1, |scale|)`.
pub fn default_tolerance(scale: f64) -> f64 {
    1e-9 * scale.abs().max(1.0)
}

/// Payoff of a traded asset: a variable of the scenario space or a parametric law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum AssetPayoff {
    Variable(String),
    Law(DistributionSpec),
}

/// An eligible asset with price `price_s0 > 0` and nonnegative terminal payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradedAsset {
    pub price_s0: f64,
    pub payoff: AssetPayoff,
}

impl TradedAsset {
    pub fn new(price_s0: f64, payoff_var: impl Into<String>) -> Self {
        TradedAsset { price_s0, payoff: AssetPayoff::Variable(payoff_var.into()) }
    }

    /// Risk-free cash, `S_0 = 1`, `S_T ≡ 1`.
    pub fn cash() -> Self {
        TradedAsset { price_s0: 1.0, payoff: AssetPayoff::Law(DistributionSpec::PointMass { c: 1.0 }) }
    }

    /// Statewise payoff on a scenario space, validated.
    pub fn payoff_vector(&self, space: &ScenarioSpace) -> Result<Vec<f64>> {
        if !(self.price_s0.is_finite() && self.price_s0 > 0.0) {
            return Err(Error::BadAsset(format!("price must be positive, got {}", self.price_s0)));
        }
        let s = match &self.payoff {
            AssetPayoff::Variable(name) => space.var(name)?.to_vec(),
            AssetPayoff::Law(DistributionSpec::PointMass { c }) => vec![*c; space.n_states()],
            AssetPayoff::Law(_) => {
                return Err(Error::BadAsset("a random parametric payoff has no statewise values".into()))
            }
        };
        if let Some(v) = s.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::BadAsset(format!("payoff takes the negative value {v}")));
        }
        if s.iter().all(|v| *v == 0.0) {
            return Err(Error::BadAsset("payoff is identically zero".into()));
        }
        Ok(s)
    }
}

/// Smallest `m` with `accept(m)`, for a predicate that is monotone in `m`.
///
/// The bracket is grown geometrically from `m = 0` up to `M_MAX`, then
/// bisected to width `tol`; the midpoint of the final bracket is returned.
pub fn capital_requirement<F>(mut accept: F, tol: f64) -> Result<ExtendedReal>
where
    F: FnMut(f64) -> Result<bool>,
{
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    let (mut lo, mut hi);
    if accept(0.0)? {
        hi = 0.0;
        let mut step = 1.0f64;
        loop {
            let m = (-step).max(-M_MAX);
            if !accept(m)? {
                lo = m;
                break;
            }
            if m <= -M_MAX {
                return Ok(ExtendedReal::MinusInfinity);
            }
            hi = m;
            step *= 2.0;
        }
    } else {
        lo = 0.0;
        let mut step = 1.0f64;
        loop {
            let m = step.min(M_MAX);
            if accept(m)? {
                hi = m;
                break;
            }
            if m >= M_MAX {
                return Ok(ExtendedReal::PlusInfinity);
            }
            lo = m;
            step *= 2.0;
        }
    }
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if accept(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ExtendedReal::Finite(lo + 0.5 * (hi - lo)))
}

/// `ρ_{A,S}(X)` for the variable `var` of `space`.
pub fn eval_risk(
    space: &ScenarioSpace,
    var: &str,
    asset: &TradedAsset,
    acc: &AcceptanceSpec,
    tol: f64,
) -> Result<ExtendedReal> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    acc.validate()?;
    let x = space.var(var)?;
    let s = asset.payoff_vector(space)?;
    if let AcceptanceSpec::UtilityFloor { utility } = acc {
        // Rounding would otherwise accept once e^{-m} underflows.
        if utility.level_unreachable() {
            return Ok(ExtendedReal::PlusInfinity);
        }
    }
    let units = 1.0 / asset.price_s0;
    let probs = space.probs();
    let mut shifted = vec![0.0; x.len()];
    capital_requirement(
        |m| {
            for ((out, xi), si) in shifted.iter_mut().zip(x).zip(&s) {
                *out = xi + m * units * si;
            }
            acceptable(&EmpiricalDistribution::from_values_weights(&shifted, probs)?, acc)
        },
        tol,
    )
}
