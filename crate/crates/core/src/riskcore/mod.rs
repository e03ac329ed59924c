//! Acceptance sets, closed-form risk evaluators, the capital-requirement
//! engine for general eligible assets, and finiteness criteria.

mod counterexample;
mod engine;
mod evaluators;
mod finiteness;
mod spec;

pub use counterexample::{
    reproduce_counterexample, reproduce_counterexample_cash, CounterexampleParams, CounterexampleRecord,
};
pub use engine::{capital_requirement, default_tolerance, eval_risk, AssetPayoff, TradedAsset, M_MAX};
pub use evaluators::{
    acceptable, cash_risk, distortion_rho, expected_utility, is_acceptable, log_mean_exp, max_correlation_rho,
    min_correlation, tvar_alpha, utility_expectation, var_alpha,
};
pub use finiteness::{finiteness_check, FinitenessVerdict};
pub use spec::{
    AcceptanceSpec, CustomFn, DensitySpec, DistortionFamily, DistortionSpec, ExtendedReal, UtilityFamily, UtilitySpec,
};
