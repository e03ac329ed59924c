//! Law-invariant risk measures with general eligible assets on finite
//! scenario spaces: evaluation, finiteness, indices of finiteness and of
//! qualitative robustness, probability metrics and Monte Carlo robustness
//! experiments.

pub mod canonical;
pub mod duality;
pub mod error;
pub mod indices;
pub mod metrics;
pub mod riskcore;
pub mod robustlab;
pub mod scenario;

pub use error::{Error, Result};
