//! Finite probability spaces, finite laws on the real line, parametric
//! distribution specs and reproducible sampling.

mod distribution;
mod empirical;
pub mod rng;
mod space;

pub use distribution::{sample, sample_stream, DistributionSpec, TailSign};
pub use empirical::{comonotone_product, EmpiricalDistribution};
pub use space::ScenarioSpace;
