//! Two positions with the same law but different capital requirements when
//! the eligible asset is random.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::ScenarioSpace;

use super::engine::{eval_risk, TradedAsset};
use super::spec::{AcceptanceSpec, ExtendedReal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub p: f64,
    pub s0: f64,
    pub tol: f64,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        CounterexampleParams { gamma1: 1.0, gamma2: 2.0, lambda: -1.5, alpha: 0.1, p: 0.2, s0: 1.0, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    pub rho_x: ExtendedReal,
    pub rho_y: ExtendedReal,
    pub same_law: bool,
    /// `rho_x > s0 >= rho_y`.
    pub inequality_holds: bool,
}

impl CounterexampleParams {
    pub fn validate(&self) -> Result<()> {
        let Self { gamma1, gamma2, lambda, alpha, p, s0, tol } = *self;
        let bad = |m: &str| Err(Error::BadParameters(m.into()));
        if ![gamma1, gamma2, lambda, alpha, p, s0, tol].iter().all(|v| v.is_finite()) {
            return bad("all parameters must be finite");
        }
        if !(0.0 < gamma1 && gamma1 < gamma2) {
            return bad("need 0 < gamma1 < gamma2");
        }
        if !(-gamma2 < lambda && lambda < -gamma1) {
            return bad("need -gamma2 < lambda < -gamma1");
        }
        if !(0.0 < alpha && alpha < 1.0) {
            return bad("need 0 < alpha < 1");
        }
        // State C carries probability 1 - 2p, so p < 1/2 is needed as well.
        if !(0.0 < p && p < 1.0 - alpha && p < 0.5) {
            return bad("need 0 < p < min(1 - alpha, 1/2)");
        }
        if s0 <= 0.0 {
            return bad("need s0 > 0");
        }
        if tol <= 0.0 {
            return Err(Error::BadTolerance(tol));
        }
        Ok(())
    }

    /// States `A`, `B`, `C` with probabilities `p`, `p`, `1 - 2p`; variables
    /// `S` (payoff), `X = λ1_A - S 1_C` and `Y = λ1_B - S 1_C`.
    pub fn space(&self) -> Result<ScenarioSpace> {
        self.validate()?;
        let Self { gamma1, gamma2, lambda, p, .. } = *self;
        ScenarioSpace::new(vec![p, p, 1.0 - 2.0 * p])?
            .with_var("S", vec![gamma1, gamma2, gamma2])?
            .with_var("X", vec![lambda, 0.0, -gamma2])?
            .with_var("Y", vec![0.0, lambda, -gamma2])
    }
}

fn run(params: &CounterexampleParams, asset: TradedAsset) -> Result<CounterexampleRecord> {
    let space = params.space()?;
    let acc = AcceptanceSpec::TVaRLevel { alpha: params.alpha };
    let rho_x = eval_risk(&space, "X", &asset, &acc, params.tol)?;
    let rho_y = eval_risk(&space, "Y", &asset, &acc, params.tol)?;
    let same_law = space.law_of("X")?.same_law(&space.law_of("Y")?, 1e-12);
    let s0 = params.s0;
    let inequality_holds = rho_x.to_f64() > s0 && s0 >= rho_y.to_f64();
    Ok(CounterexampleRecord { rho_x, rho_y, same_law, inequality_holds })
}

/// Capital requirements of `X` and `Y` for TVaR acceptability with the
/// random asset `(s0, S)`.
pub fn reproduce_counterexample(params: &CounterexampleParams) -> Result<CounterexampleRecord> {
    run(params, TradedAsset::new(params.s0, "S"))
}

/// Same positions with the cash asset, where the risk measure is law-invariant.
pub fn reproduce_counterexample_cash(params: &CounterexampleParams) -> Result<CounterexampleRecord> {
    run(params, TradedAsset::cash())
}
