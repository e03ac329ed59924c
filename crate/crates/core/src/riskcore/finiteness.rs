//! When is `ρ_{A,S}` finite on bounded positions?

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{DistributionSpec, EmpiricalDistribution};

use super::evaluators::min_correlation;
use super::spec::{AcceptanceSpec, DistortionSpec};

/// Cells of the quantile grid used to bound `inf_{Z ~ S_T} E_Q[Z]` from below
/// for continuous payoffs.
const QUANTILE_CELLS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitenessVerdict {
    pub finite: bool,
    /// The condition that was checked.
    pub criterion: String,
    /// The quantity the decision was based on.
    pub witness: Option<f64>,
}

/// Decides finiteness of `ρ_{A,S}` on bounded positions for an asset with
/// price `s0` and payoff law `payoff`.
pub fn finiteness_check(acc: &AcceptanceSpec, payoff: &DistributionSpec, s0: f64) -> Result<FinitenessVerdict> {
    acc.validate()?;
    payoff.validate()?;
    if !(s0.is_finite() && s0 > 0.0) {
        return Err(Error::BadAsset(format!("price must be positive, got {s0}")));
    }
    if payoff.essinf() < 0.0 {
        return Err(Error::UnsupportedSpec("payoff law must be supported on [0, ∞)".into()));
    }
    if payoff.esssup() <= 0.0 {
        return Err(Error::BadAsset("payoff is almost surely zero".into()));
    }
    let p_zero = payoff.atom_mass(0.0);
    let verdict = match acc {
        AcceptanceSpec::ExpectationFloor { .. } => {
            let p_pos = 1.0 - p_zero;
            FinitenessVerdict { finite: p_pos > 0.0, criterion: "P(S_T > 0) > 0".into(), witness: Some(p_pos) }
        }
        AcceptanceSpec::TVaRLevel { alpha } => distortion_verdict(&DistortionSpec::tvar(*alpha)?, p_zero),
        AcceptanceSpec::Distortion { distortion } => distortion_verdict(distortion, p_zero),
        AcceptanceSpec::UtilityFloor { utility } => {
            if !utility.attains_minus_infinity() && utility.exceeds_level_somewhere() {
                FinitenessVerdict {
                    finite: p_zero == 0.0,
                    criterion: "u finite with u(x) > alpha somewhere: P(S_T = 0) = 0".into(),
                    witness: Some(p_zero),
                }
            } else {
                let inf = payoff.essinf();
                FinitenessVerdict {
                    finite: inf > 0.0,
                    criterion: "u attains -inf or u <= alpha: essinf S_T > 0".into(),
                    witness: Some(inf),
                }
            }
        }
        AcceptanceSpec::MaxCorrelation { density } => {
            let (law, exact) = payoff_law(payoff)?;
            let value = min_correlation(&law, density)?;
            let criterion = if exact {
                "inf over Z ~ S_T of E_Q[Z] > 0".to_string()
            } else {
                format!("inf over Z ~ S_T of E_Q[Z] > 0 (lower bound on a {QUANTILE_CELLS}-cell quantile grid)")
            };
            FinitenessVerdict { finite: value > 0.0, criterion, witness: Some(value) }
        }
    };
    Ok(verdict)
}

/// `δ(F_{S_T}(x)) < 1` for small `x > 0`; by right-continuity the smallest
/// such value is `δ(P(S_T = 0))`.
fn distortion_verdict(delta: &DistortionSpec, p_zero: f64) -> FinitenessVerdict {
    let w = delta.eval(p_zero);
    FinitenessVerdict {
        finite: w < 1.0,
        criterion: "delta(F_S_T(x)) < 1 for some x > 0".into(),
        witness: Some(w),
    }
}

/// Exact law for finite payoffs; otherwise a law dominated by the payoff in
/// the quantile order, obtained from the left endpoints of a uniform grid.
fn payoff_law(payoff: &DistributionSpec) -> Result<(EmpiricalDistribution, bool)> {
    match payoff {
        DistributionSpec::PointMass { c } => Ok((EmpiricalDistribution::point_mass(*c)?, true)),
        DistributionSpec::FiniteDiscrete { atoms } => Ok((atoms.clone(), true)),
        _ => {
            let n = QUANTILE_CELLS;
            let mut values = Vec::with_capacity(n);
            values.push(payoff.essinf().max(0.0));
            for k in 1..n {
                values.push(payoff.quantile(k as f64 / n as f64)?);
            }
            Ok((EmpiricalDistribution::uniform(&values)?, false))
        }
    }
}
