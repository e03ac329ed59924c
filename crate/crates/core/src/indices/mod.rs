//! Index of finiteness and index of qualitative robustness.
//!
//! The index of finiteness is the smallest `p` for which the risk measure
//! admits a finite, continuous extension to `L^p`; its reciprocal is the
//! index of qualitative robustness. Neither depends on the eligible asset,
//! which is why nothing here takes one.

mod numeric;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::riskcore::{
    AcceptanceSpec, CustomFn, DensitySpec, DistortionFamily, DistortionSpec, ExtendedReal, UtilityFamily, UtilitySpec,
};

pub use numeric::{estimate_distortion_index, estimate_utility_decay};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Attainment {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexMethod {
    Analytic,
    NumericFit,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IndexDiagnostics {
    pub fitted_exponent: Option<f64>,
    pub residual: Option<f64>,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub index: ExtendedReal,
    /// Whether the infimum defining the index is attained.
    pub attained: Attainment,
    pub method: IndexMethod,
    pub diagnostics: IndexDiagnostics,
}

impl IndexReport {
    fn analytic(index: f64, attained: Attainment) -> Self {
        let index = ExtendedReal::from_f64(index);
        // An infinite index is never attained.
        let attained = if index.is_finite() { attained } else { Attainment::No };
        IndexReport { index, attained, method: IndexMethod::Analytic, diagnostics: IndexDiagnostics::default() }
    }
}

/// Hölder conjugate `p / (p - 1)`, with `1 ↦ ∞` and `∞ ↦ 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `sup{s : D ∈ L^s}` for the density `D`.
pub fn density_moment_threshold(density: &DensitySpec) -> f64 {
    match density {
        DensitySpec::EmpiricalDensity { .. } => f64::INFINITY,
        DensitySpec::QuantilePower { r } => *r,
    }
}

/// Index of finiteness from the closed-form table, falling back to the
/// numeric estimators for custom utilities and distortions.
pub fn index_of_finiteness(acc: &AcceptanceSpec) -> Result<IndexReport> {
    acc.validate()?;
    use Attainment::*;
    Ok(match acc {
        AcceptanceSpec::ExpectationFloor { .. } | AcceptanceSpec::TVaRLevel { .. } => IndexReport::analytic(1.0, Yes),
        AcceptanceSpec::UtilityFloor { utility } => utility_index(utility),
        AcceptanceSpec::MaxCorrelation { density } => {
            let q = density_moment_threshold(density);
            // D ∈ L^q fails exactly at the boundary for the power profile.
            let attained = if q.is_infinite() { Yes } else { No };
            IndexReport::analytic(conjugate(q), attained)
        }
        AcceptanceSpec::Distortion { distortion } => distortion_index(distortion)?,
    })
}

fn utility_index(u: &UtilitySpec) -> IndexReport {
    use Attainment::*;
    if u.attains_minus_infinity() || !u.exceeds_level_somewhere() {
        return IndexReport::analytic(f64::INFINITY, No);
    }
    match u.family {
        UtilityFamily::FlatPower { q } => IndexReport::analytic(q, Yes),
        UtilityFamily::Exponential { .. } | UtilityFamily::CappedLog { .. } => IndexReport::analytic(f64::INFINITY, No),
        UtilityFamily::NonHara { .. } => IndexReport::analytic(1.0, Yes),
        UtilityFamily::Custom(_) => estimate_utility_decay(u),
    }
}

fn distortion_index(delta: &DistortionSpec) -> Result<IndexReport> {
    use Attainment::*;
    // Power singularity of order 1 - 1/g at zero; g = 1 is the identity.
    let power = |g: f64| if g == 1.0 { IndexReport::analytic(1.0, Yes) } else { IndexReport::analytic(g, No) };
    Ok(match delta.family {
        DistortionFamily::MaxVar { gamma }
        | DistortionFamily::MaxMinVar { gamma }
        | DistortionFamily::MinMaxVar { gamma } => power(gamma),
        DistortionFamily::BetaGamma { beta, .. } => power(beta),
        DistortionFamily::MinVar { .. } | DistortionFamily::LogDistortion => IndexReport::analytic(1.0, Yes),
        DistortionFamily::Custom { .. } => estimate_distortion_index(delta)?,
    })
}

/// Distortion whose Choquet integral equals the max-correlation risk measure
/// for `density`: `G(t) = ∫_0^t q_D(1 - s) ds`.
pub fn induced_distortion(density: &DensitySpec) -> Result<DistortionSpec> {
    match density {
        DensitySpec::QuantilePower { r } => {
            let r = *r;
            let e = 1.0 - 1.0 / r;
            DistortionSpec::new(DistortionFamily::Custom {
                distortion: CustomFn::new(move |t: f64| t.powf(e)),
                right_derivative: Some(CustomFn::new(move |t: f64| e * t.powf(e - 1.0))),
            })
        }
        DensitySpec::EmpiricalDensity { .. } => {
            let law = density.law().expect("validated density");
            // Largest density values first.
            let atoms: Vec<(f64, f64)> = law.atoms().rev().collect();
            let breaks: Vec<f64> = atoms
                .iter()
                .scan(0.0, |acc, &(_, w)| {
                    *acc += w;
                    Some(*acc)
                })
                .collect();
            let a2 = atoms.clone();
            let b2 = breaks.clone();
            let g = move |t: f64| {
                let mut acc = 0.0;
                let mut prev = 0.0;
                for ((d, _), &c) in a2.iter().zip(&b2) {
                    let hi = c.min(t);
                    if hi > prev {
                        acc += d * (hi - prev);
                    }
                    prev = c;
                }
                acc.min(1.0)
            };
            let deriv = move |t: f64| {
                let k = breaks.partition_point(|&c| c <= t).min(atoms.len() - 1);
                atoms[k].0
            };
            DistortionSpec::new(DistortionFamily::Custom {
                distortion: CustomFn::new(g),
                right_derivative: Some(CustomFn::new(deriv)),
            })
        }
    }
}

/// Index of finiteness computed from numeric estimators only.
pub fn numeric_index_of_finiteness(acc: &AcceptanceSpec) -> Result<IndexReport> {
    acc.validate()?;
    match acc {
        AcceptanceSpec::ExpectationFloor { .. } => estimate_distortion_index(&DistortionSpec::identity()),
        AcceptanceSpec::TVaRLevel { alpha } => estimate_distortion_index(&DistortionSpec::tvar(*alpha)?),
        AcceptanceSpec::UtilityFloor { utility } => Ok(estimate_utility_decay(utility)),
        AcceptanceSpec::Distortion { distortion } => estimate_distortion_index(distortion),
        AcceptanceSpec::MaxCorrelation { density } => estimate_distortion_index(&induced_distortion(density)?),
    }
}

/// Reciprocal of the index of finiteness (`∞ ↦ 0`).
pub fn index_of_qualitative_robustness(acc: &AcceptanceSpec) -> Result<IndexReport> {
    Ok(reciprocal(index_of_finiteness(acc)?))
}

pub fn reciprocal(report: IndexReport) -> IndexReport {
    let index = match report.index {
        ExtendedReal::PlusInfinity => 0.0,
        other => 1.0 / other.to_f64(),
    };
    IndexReport { index: ExtendedReal::Finite(index), ..report }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(f: DistortionFamily) -> AcceptanceSpec {
        AcceptanceSpec::Distortion { distortion: DistortionSpec::new(f).unwrap() }
    }

    #[test]
    fn conjugate_involution() {
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            assert_eq!(conjugate(conjugate(p)), p);
        }
        assert_eq!(conjugate(2.0), 2.0);
        assert_eq!(conjugate(1.5), 3.0);
    }

    #[test]
    fn analytic_examples() {
        let r = index_of_finiteness(&dist(DistortionFamily::MaxVar { gamma: 3.0 })).unwrap();
        assert_eq!((r.index, r.attained), (ExtendedReal::Finite(3.0), Attainment::No));
        let fp = AcceptanceSpec::UtilityFloor {
            utility: UtilitySpec::new(UtilityFamily::FlatPower { q: 2.0 }, -1.0).unwrap(),
        };
        let r = index_of_finiteness(&fp).unwrap();
        assert_eq!((r.index, r.attained), (ExtendedReal::Finite(2.0), Attainment::Yes));
        let ex = AcceptanceSpec::UtilityFloor {
            utility: UtilitySpec::new(UtilityFamily::Exponential { gamma: 1.0 }, 0.0).unwrap(),
        };
        assert_eq!(index_of_finiteness(&ex).unwrap().index, ExtendedReal::PlusInfinity);
        assert_eq!(index_of_qualitative_robustness(&ex).unwrap().index, ExtendedReal::Finite(0.0));
        let bg = dist(DistortionFamily::BetaGamma { beta: 2.0, gamma: 3.0 });
        assert_eq!(index_of_qualitative_robustness(&bg).unwrap().index, ExtendedReal::Finite(0.5));
        let tv = AcceptanceSpec::TVaRLevel { alpha: 0.05 };
        assert_eq!(index_of_qualitative_robustness(&tv).unwrap().index, ExtendedReal::Finite(1.0));
    }

    #[test]
    fn density_thresholds() {
        assert_eq!(density_moment_threshold(&DensitySpec::quantile_power(3.0).unwrap()), 3.0);
        assert_eq!(density_moment_threshold(&DensitySpec::unit()), f64::INFINITY);
        let acc = AcceptanceSpec::MaxCorrelation { density: DensitySpec::quantile_power(1.5).unwrap() };
        assert_eq!(index_of_finiteness(&acc).unwrap().index, ExtendedReal::Finite(3.0));
    }

    #[test]
    fn numeric_distortion_examples() {
        let r = estimate_distortion_index(&DistortionSpec::new(DistortionFamily::MaxVar { gamma: 2.0 }).unwrap()).unwrap();
        assert!((r.index.to_f64() - 2.0).abs() < 0.05, "{r:?}");
        assert_eq!(r.attained, Attainment::No);
        for fam in [DistortionFamily::MinVar { gamma: 4.0 }, DistortionFamily::LogDistortion] {
            let r = estimate_distortion_index(&DistortionSpec::new(fam).unwrap()).unwrap();
            assert_eq!((r.index, r.attained), (ExtendedReal::Finite(1.0), Attainment::Yes));
        }
    }

    #[test]
    fn numeric_utility_examples() {
        let custom = |f: fn(f64) -> f64, a: f64| UtilitySpec::new(UtilityFamily::Custom(CustomFn::new(f)), a).unwrap();
        let fp3 = custom(|x| if x < 0.0 { -(-x).powi(3) } else { 0.0 }, -1.0);
        assert!((estimate_utility_decay(&fp3).index.to_f64() - 3.0).abs() < 0.05);
        let ex2 = custom(|x| -(-2.0 * x).exp_m1(), 0.0);
        assert_eq!(estimate_utility_decay(&ex2).index, ExtendedReal::PlusInfinity);
        let nh = custom(|x| if x >= 0.0 { 0.0 } else { 1.0 + x - (1.0 + x * x).sqrt() }, -1.0);
        assert!((estimate_utility_decay(&nh).index.to_f64() - 1.0).abs() < 0.05);
    }

    #[test]
    fn induced_distortion_matches_evaluator() {
        use crate::riskcore::{distortion_rho, max_correlation_rho};
        use crate::scenario::EmpiricalDistribution;
        let d = EmpiricalDistribution::uniform(&[1.0, -2.0, 3.0, 0.5]).unwrap();
        for dens in [
            DensitySpec::empirical(vec![0.3, 1.5, 1.2], vec![1.0 / 3.0; 3]).unwrap(),
            DensitySpec::quantile_power(2.5).unwrap(),
        ] {
            let g = induced_distortion(&dens).unwrap();
            let a = distortion_rho(&d, &g);
            let b = max_correlation_rho(&d, &dens).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}
