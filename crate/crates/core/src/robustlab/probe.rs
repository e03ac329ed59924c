use crate::error::{Error, Result};
use crate::riskcore::{cash_risk, AcceptanceSpec, ExtendedReal};
use crate::scenario::EmpiricalDistribution;

/// Evaluates the cash-additive risk along `X_n = -n^(1/p)` on an event of
/// probability `1/n²` (zero elsewhere), a sequence with `‖X_n‖_p = n^(-1/p) → 0`.
///
/// Returns `(‖X_n‖_p, ρ(X_n))` for each `n`. The risk converges to `ρ(0)`
/// along every such sequence when the risk measure extends continuously to
/// `L^p`, and can diverge otherwise.
pub fn lp_continuity_probe(acc: &AcceptanceSpec, p: f64, n_list: &[usize]) -> Result<Vec<(f64, ExtendedReal)>> {
    if !matches!(acc, AcceptanceSpec::UtilityFloor { .. } | AcceptanceSpec::TVaRLevel { .. }) {
        return Err(Error::UnsupportedSpec("the continuity probe supports UtilityFloor and TVaRLevel only".into()));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::BadExponent(p));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadParameters("n_list must be strictly increasing".into()));
    }
    n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::BadCount(n));
            }
            let nf = n as f64;
            let loss = -nf.powf(1.0 / p);
            let mass = 1.0 / (nf * nf);
            let law = if n == 1 {
                EmpiricalDistribution::point_mass(loss)?
            } else {
                EmpiricalDistribution::new(&[(loss, mass), (0.0, 1.0 - mass)])?
            };
            Ok((nf.powf(-1.0 / p), cash_risk(&law, acc)?))
        })
        .collect()
}
