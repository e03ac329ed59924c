//! Closed-form evaluators on finite laws.

use crate::error::{Error, Result};
use crate::scenario::{comonotone_product, EmpiricalDistribution, ScenarioSpace};

use super::engine::{capital_requirement, default_tolerance};
use super::spec::{AcceptanceSpec, DensitySpec, DistortionSpec, ExtendedReal, UtilityFamily, UtilitySpec};

fn check_level(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::BadLevel(alpha))
    }
}

/// `VaR_α(X) = inf{m : P(X + m < 0) <= α} = -q(α+)`.
pub fn var_alpha(d: &EmpiricalDistribution, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    Ok(-d.upper_quantile(alpha)?)
}

/// `TVaR_α(X) = (1/α) ∫_0^α VaR_β(X) dβ`, splitting the atom that straddles `α`.
pub fn tvar_alpha(d: &EmpiricalDistribution, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    let mut acc = 0.0;
    let mut prev = 0.0;
    for ((v, _), &c) in d.atoms().zip(d.cumulative()) {
        let hi = c.min(alpha);
        if hi > prev {
            acc += v * ((hi - prev) / alpha);
        }
        if c >= alpha {
            break;
        }
        prev = c;
    }
    Ok(-acc)
}

/// Choquet integral `-Σ x_i (δ(F_i) - δ(F_{i-1}))` over the sorted atoms.
pub fn distortion_rho(d: &EmpiricalDistribution, delta: &DistortionSpec) -> f64 {
    distorted_sum(d, |t| delta.eval(t))
}

fn distorted_sum(d: &EmpiricalDistribution, g: impl Fn(f64) -> f64) -> f64 {
    let mut prev = g(0.0);
    let mut acc = 0.0;
    for ((v, _), &c) in d.atoms().zip(d.cumulative()) {
        let cur = g(c);
        acc += v * (cur - prev);
        prev = cur;
    }
    -acc
}

/// Cumulative quantile profile `t^(1 - 1/r)` of the `QuantilePower` density.
fn quantile_power_mass(r: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| t.clamp(0.0, 1.0).powf(1.0 - 1.0 / r)
}

/// `sup{E[-XY] : Y ~ D}`, attained by pairing the quantiles of `-X` and `D` comonotonically.
pub fn max_correlation_rho(d: &EmpiricalDistribution, density: &DensitySpec) -> Result<f64> {
    match density {
        DensitySpec::EmpiricalDensity { .. } => {
            let law = density_law(density)?;
            Ok(comonotone_product(&d.negated(), &law))
        }
        // The decreasing profile weights the lowest values of X most.
        DensitySpec::QuantilePower { r } => Ok(distorted_sum(d, quantile_power_mass(*r))),
    }
}

/// `inf{E[ZY] : Y ~ D}` for `Z ~ d`, the antimonotone coupling value.
pub fn min_correlation(d: &EmpiricalDistribution, density: &DensitySpec) -> Result<f64> {
    match density {
        DensitySpec::EmpiricalDensity { .. } => {
            let law = density_law(density)?;
            Ok(-comonotone_product(d, &law.negated()))
        }
        DensitySpec::QuantilePower { r } => Ok(-distorted_sum(d, quantile_power_mass(*r))),
    }
}

fn density_law(density: &DensitySpec) -> Result<EmpiricalDistribution> {
    density.law().ok_or_else(|| Error::BadDensity("density values do not form a law".into()))
}

/// `E[u(X)]` for a law; `-∞` as soon as an atom hits `u = -∞`.
pub fn expected_utility(d: &EmpiricalDistribution, u: &UtilitySpec) -> f64 {
    shifted_expected_utility(d, u, 0.0)
}

fn shifted_expected_utility(d: &EmpiricalDistribution, u: &UtilitySpec, m: f64) -> f64 {
    let mut acc = 0.0;
    for (v, w) in d.atoms() {
        let val = u.eval(v + m);
        if val == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        acc += w * val;
    }
    acc
}

/// `Σ p_i u(x_i)` over the states of a scenario space.
pub fn utility_expectation(space: &ScenarioSpace, var: &str, u: &UtilitySpec) -> Result<f64> {
    let x = space.var(var)?;
    let mut acc = 0.0;
    for (&v, &p) in x.iter().zip(space.probs()) {
        let val = u.eval(v);
        if val == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        acc += p * val;
    }
    Ok(acc)
}

/// Membership of a law in the acceptance set.
pub fn acceptable(d: &EmpiricalDistribution, acc: &AcceptanceSpec) -> Result<bool> {
    Ok(match acc {
        AcceptanceSpec::ExpectationFloor { alpha } => d.mean() >= *alpha,
        AcceptanceSpec::TVaRLevel { alpha } => tvar_alpha(d, *alpha)? <= 0.0,
        AcceptanceSpec::UtilityFloor { utility } => expected_utility(d, utility) >= utility.level_alpha,
        AcceptanceSpec::Distortion { distortion } => distortion_rho(d, distortion) <= 0.0,
        AcceptanceSpec::MaxCorrelation { density } => max_correlation_rho(d, density)? <= 0.0,
    })
}

/// Membership of a scenario variable in the acceptance set (through its law).
pub fn is_acceptable(space: &ScenarioSpace, var: &str, acc: &AcceptanceSpec) -> Result<bool> {
    acc.validate()?;
    acceptable(&space.law_of(var)?, acc)
}

/// Cash-additive risk `inf{m : X + m ∈ A}` of a law: closed forms where they
/// exist, bisection on the shift otherwise.
pub fn cash_risk(d: &EmpiricalDistribution, acc: &AcceptanceSpec) -> Result<ExtendedReal> {
    acc.validate()?;
    let v = match acc {
        AcceptanceSpec::ExpectationFloor { alpha } => alpha - d.mean(),
        AcceptanceSpec::TVaRLevel { alpha } => tvar_alpha(d, *alpha)?,
        AcceptanceSpec::Distortion { distortion } => distortion_rho(d, distortion),
        AcceptanceSpec::MaxCorrelation { density } => max_correlation_rho(d, density)?,
        AcceptanceSpec::UtilityFloor { utility } => return utility_cash_risk(d, utility),
    };
    Ok(ExtendedReal::Finite(v))
}

fn utility_cash_risk(d: &EmpiricalDistribution, u: &UtilitySpec) -> Result<ExtendedReal> {
    if u.level_unreachable() {
        return Ok(ExtendedReal::PlusInfinity);
    }
    if let UtilityFamily::Exponential { gamma } = u.family {
        // E[1 - e^{-γ(X+m)}] >= α  <=>  m >= (log E[e^{-γX}] - log(1 - α)) / γ
        return Ok(ExtendedReal::from_f64(
            (log_mean_exp(d, gamma) - (-u.level_alpha).ln_1p()) / gamma,
        ));
    }
    let scale = d.min().abs().max(d.max().abs());
    capital_requirement(|m| Ok(shifted_expected_utility(d, u, m) >= u.level_alpha), default_tolerance(scale))
}

/// `log E[exp(-γX)]`, computed stably.
pub fn log_mean_exp(d: &EmpiricalDistribution, gamma: f64) -> f64 {
    let top = d.atoms().map(|(v, _)| -gamma * v).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = d.atoms().map(|(v, w)| w * (-gamma * v - top).exp()).sum();
    top + s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riskcore::spec::{CustomFn, DistortionFamily};

    fn four() -> EmpiricalDistribution {
        EmpiricalDistribution::uniform(&[-10.0, -5.0, 0.0, 5.0]).unwrap()
    }

    // Smallest m among the negated atoms with P(X + m < 0) <= α.
    fn var_scan(d: &EmpiricalDistribution, alpha: f64) -> f64 {
        let mut cands: Vec<f64> = d.values().iter().map(|v| -v).collect();
        cands.sort_by(f64::total_cmp);
        *cands
            .iter()
            .find(|&&m| d.atoms().filter(|(v, _)| v + m < 0.0).map(|(_, w)| w).sum::<f64>() <= alpha + 1e-12)
            .unwrap()
    }

    #[test]
    fn var_examples() {
        assert_eq!(var_alpha(&EmpiricalDistribution::point_mass(2.5).unwrap(), 0.3).unwrap(), -2.5);
        assert_eq!(var_alpha(&four(), 0.25).unwrap(), 5.0);
        assert_eq!(var_alpha(&four(), 0.5).unwrap(), 0.0);
        for a in [0.1, 0.25, 0.3, 0.5, 0.74, 0.75, 0.9] {
            assert_eq!(var_alpha(&four(), a).unwrap(), var_scan(&four(), a));
        }
        assert!(var_alpha(&four(), 1.0).is_err());
    }

    #[test]
    fn tvar_examples() {
        assert_eq!(tvar_alpha(&EmpiricalDistribution::point_mass(3.0).unwrap(), 0.2).unwrap(), -3.0);
        assert!((tvar_alpha(&four(), 0.5).unwrap() - 7.5).abs() < 1e-12);
        assert!((tvar_alpha(&four(), 0.25).unwrap() - 10.0).abs() < 1e-12);
        // Atom split: worst 0.3 = 0.25 at -10 plus 0.05 at -5.
        assert!((tvar_alpha(&four(), 0.3).unwrap() - (2.5 + 0.25) / 0.3).abs() < 1e-12);
        assert!(tvar_alpha(&four(), 0.0).is_err());
    }

    #[test]
    fn distortion_examples() {
        let d = EmpiricalDistribution::uniform(&[-1.0, 1.0]).unwrap();
        let mv = DistortionSpec::new(DistortionFamily::MaxVar { gamma: 2.0 }).unwrap();
        assert!((distortion_rho(&d, &mv) - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        let id = DistortionSpec::new(DistortionFamily::Custom { distortion: CustomFn::new(|x| x), right_derivative: None })
            .unwrap();
        assert!((distortion_rho(&four(), &id) - 2.5).abs() < 1e-12);
        let c = EmpiricalDistribution::point_mass(-4.0).unwrap();
        assert_eq!(distortion_rho(&c, &mv), 4.0);
    }

    #[test]
    fn max_correlation_examples() {
        let d = EmpiricalDistribution::uniform(&[1.0, -2.0, 3.0]).unwrap();
        let dens = DensitySpec::empirical(vec![0.3, 1.5, 1.2], vec![1.0 / 3.0; 3]).unwrap();
        assert!((max_correlation_rho(&d, &dens).unwrap() - 0.3).abs() < 1e-12);
        assert!((min_correlation(&d, &dens).unwrap() - (-0.3)).abs() < 1e-12);
        let neg = EmpiricalDistribution::uniform(&[-1.0, 2.0, -3.0]).unwrap();
        assert!((min_correlation(&neg, &dens).unwrap() - (-1.7)).abs() < 1e-12);
        assert!((max_correlation_rho(&four(), &DensitySpec::unit()).unwrap() - 2.5).abs() < 1e-12);
        assert!((min_correlation(&four(), &DensitySpec::unit()).unwrap() + 2.5).abs() < 1e-12);
        let c = EmpiricalDistribution::point_mass(2.0).unwrap();
        assert!((max_correlation_rho(&c, &dens).unwrap() + 2.0).abs() < 1e-12);
        assert!((min_correlation(&c, &dens).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_power_weights_the_left_tail() {
        let qp = DensitySpec::quantile_power(2.0).unwrap();
        // Profile (1/2) t^{-1/2}: mass sqrt(1/2) on the lower half.
        let d = EmpiricalDistribution::uniform(&[-1.0, 1.0]).unwrap();
        let expect = 0.5f64.sqrt() - (1.0 - 0.5f64.sqrt());
        assert!((max_correlation_rho(&d, &qp).unwrap() - expect).abs() < 1e-12);
        assert!((min_correlation(&d, &qp).unwrap() + expect).abs() < 1e-12);
    }

    #[test]
    fn utility_examples() {
        let s = ScenarioSpace::uniform(2).unwrap().with_var("X", vec![-0.5, 2.0]).unwrap();
        let cl = UtilitySpec::new(UtilityFamily::CappedLog { c: 1.0 }, 0.0).unwrap();
        assert_eq!(utility_expectation(&s, "X", &cl).unwrap(), f64::NEG_INFINITY);
        let s = ScenarioSpace::uniform(2).unwrap().with_var("X", vec![-2.0, 3.0]).unwrap();
        let fp = UtilitySpec::new(UtilityFamily::FlatPower { q: 2.0 }, -10.0).unwrap();
        assert_eq!(utility_expectation(&s, "X", &fp).unwrap(), -2.0);
        let s = ScenarioSpace::uniform(3).unwrap().with_var("X", vec![0.0; 3]).unwrap();
        let ex = UtilitySpec::new(UtilityFamily::Exponential { gamma: 1.0 }, 0.0).unwrap();
        assert_eq!(utility_expectation(&s, "X", &ex).unwrap(), 0.0);
    }

    #[test]
    fn acceptability_examples() {
        let s = ScenarioSpace::uniform(4).unwrap().with_var("X", vec![-10.0, -5.0, 0.0, 5.0]).unwrap();
        assert!(!is_acceptable(&s, "X", &AcceptanceSpec::TVaRLevel { alpha: 0.5 }).unwrap());
        let s2 = ScenarioSpace::uniform(2).unwrap().with_var("X", vec![-1.0, 1.0]).unwrap();
        assert!(is_acceptable(&s2, "X", &AcceptanceSpec::ExpectationFloor { alpha: 0.0 }).unwrap());
        let big = ScenarioSpace::uniform(2).unwrap().with_var("X", vec![1e6, 1e6]).unwrap();
        let specs = [
            AcceptanceSpec::ExpectationFloor { alpha: 1.0 },
            AcceptanceSpec::TVaRLevel { alpha: 0.1 },
            AcceptanceSpec::UtilityFloor {
                utility: UtilitySpec::new(UtilityFamily::CappedLog { c: 2.0 }, 1.0).unwrap(),
            },
            AcceptanceSpec::Distortion { distortion: DistortionSpec::new(DistortionFamily::LogDistortion).unwrap() },
            AcceptanceSpec::MaxCorrelation { density: DensitySpec::quantile_power(3.0).unwrap() },
        ];
        for a in &specs {
            assert!(is_acceptable(&big, "X", a).unwrap(), "{a:?}");
        }
    }

    #[test]
    fn entropic_cash_risk() {
        let d = EmpiricalDistribution::uniform(&[-1.0, 1.0]).unwrap();
        let acc = AcceptanceSpec::UtilityFloor {
            utility: UtilitySpec::new(UtilityFamily::Exponential { gamma: 1.0 }, 0.0).unwrap(),
        };
        let r = cash_risk(&d, &acc).unwrap().finite().unwrap();
        assert!((r - 1f64.cosh().ln()).abs() < 1e-12);
    }

    #[test]
    fn bisection_cash_risk_for_flat_power() {
        // E[-(X+m)_-^2] >= -0.25 with X = -1 on 1/2: (1-m)^2/2 <= 1/4.
        let d = EmpiricalDistribution::uniform(&[-1.0, 0.0]).unwrap();
        let acc = AcceptanceSpec::UtilityFloor {
            utility: UtilitySpec::new(UtilityFamily::FlatPower { q: 2.0 }, -0.25).unwrap(),
        };
        let r = cash_risk(&d, &acc).unwrap().finite().unwrap();
        assert!((r - (1.0 - 0.5f64.sqrt())).abs() < 1e-8);
    }
}
