use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

use super::rng::CounterRng;
use super::EmpiricalDistribution;

const MIXTURE_WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSign {
    Upper,
    Lower,
}

/// Parametric or finite laws used as data-generating processes and payoffs.
///
/// Serialized as a JSON object whose `type` field names the variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum DistributionSpec {
    PointMass { c: f64 },
    FiniteDiscrete { atoms: EmpiricalDistribution },
    Normal { mean: f64, sd: f64 },
    LogNormal { mean_log: f64, sd_log: f64 },
    /// `scale * U^(-1/tail_index)`, negated for the lower-tail variant.
    ParetoTail { scale: f64, tail_index: f64, sign: TailSign },
    Mixture { components: Vec<(f64, DistributionSpec)> },
    Truncated { inner: Box<DistributionSpec>, low: f64, high: f64 },
}

fn std_normal() -> Normal {
    Normal::standard()
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        use DistributionSpec::*;
        let finite = |x: f64| if x.is_finite() { Ok(()) } else { Err(Error::NonFiniteValue(x)) };
        match self {
            PointMass { c } => finite(*c),
            FiniteDiscrete { .. } => Ok(()),
            Normal { mean, sd } => {
                finite(*mean)?;
                positive("sd", *sd)
            }
            LogNormal { mean_log, sd_log } => {
                finite(*mean_log)?;
                positive("sd_log", *sd_log)
            }
            ParetoTail { scale, tail_index, .. } => {
                positive("scale", *scale)?;
                positive("tail_index", *tail_index)
            }
            Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::EmptyInput);
                }
                let mut total = 0.0;
                for (w, c) in components {
                    if !(w.is_finite() && *w >= 0.0) {
                        return Err(Error::BadWeights(format!("mixture weight {w}")));
                    }
                    total += w;
                    c.validate()?;
                }
                if (total - 1.0).abs() > MIXTURE_WEIGHT_TOL {
                    return Err(Error::BadWeights(format!("mixture weights sum to {total}")));
                }
                Ok(())
            }
            Truncated { inner, low, high } => {
                inner.validate()?;
                if low.partial_cmp(high) != Some(std::cmp::Ordering::Less) {
                    return Err(Error::BadParameters(format!("truncation needs low < high, got [{low}, {high}]")));
                }
                if inner.cdf(*high) - inner.cdf_left(*low) <= 0.0 {
                    return Err(Error::BadParameters("truncation window carries no mass".into()));
                }
                Ok(())
            }
        }
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        use DistributionSpec::*;
        match self {
            PointMass { c } => (x >= *c) as u8 as f64,
            FiniteDiscrete { atoms } => atoms.cdf(x),
            Normal { mean, sd } => std_normal().cdf((x - mean) / sd),
            LogNormal { mean_log, sd_log } => {
                if x <= 0.0 {
                    0.0
                } else {
                    std_normal().cdf((x.ln() - mean_log) / sd_log)
                }
            }
            ParetoTail { scale, tail_index, sign: TailSign::Upper } => {
                if x < *scale {
                    0.0
                } else {
                    1.0 - (scale / x).powf(*tail_index)
                }
            }
            ParetoTail { scale, tail_index, sign: TailSign::Lower } => {
                if x <= -scale {
                    (scale / -x).powf(*tail_index)
                } else {
                    1.0
                }
            }
            Mixture { components } => components.iter().map(|(w, c)| w * c.cdf(x)).sum(),
            Truncated { inner, low, high } => {
                if x < *low {
                    0.0
                } else if x >= *high {
                    1.0
                } else {
                    let lo = inner.cdf_left(*low);
                    ((inner.cdf(x) - lo) / (inner.cdf(*high) - lo)).clamp(0.0, 1.0)
                }
            }
        }
    }

    /// `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        use DistributionSpec::*;
        match self {
            PointMass { c } => (x > *c) as u8 as f64,
            FiniteDiscrete { atoms } => atoms.cdf_left(x),
            Normal { .. } | LogNormal { .. } | ParetoTail { .. } => self.cdf(x),
            Mixture { components } => components.iter().map(|(w, c)| w * c.cdf_left(x)).sum(),
            Truncated { inner, low, high } => {
                if x <= *low {
                    0.0
                } else if x > *high {
                    1.0
                } else {
                    let lo = inner.cdf_left(*low);
                    ((inner.cdf_left(x) - lo) / (inner.cdf(*high) - lo)).clamp(0.0, 1.0)
                }
            }
        }
    }

    /// Probability of the single point `x`.
    pub fn atom_mass(&self, x: f64) -> f64 {
        (self.cdf(x) - self.cdf_left(x)).max(0.0)
    }

    /// Lower quantile `inf{x : F(x) >= t}` for `t` in `(0, 1)`; `t = 1` is
    /// accepted when the law is bounded above.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        use DistributionSpec::*;
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::BadLevel(t));
        }
        let q = match self {
            PointMass { c } => *c,
            FiniteDiscrete { atoms } => atoms.quantile(t)?,
            Normal { mean, sd } => mean + sd * std_normal().inverse_cdf(t),
            LogNormal { mean_log, sd_log } => (mean_log + sd_log * std_normal().inverse_cdf(t)).exp(),
            ParetoTail { scale, tail_index, sign: TailSign::Upper } => scale * (1.0 - t).powf(-1.0 / tail_index),
            ParetoTail { scale, tail_index, sign: TailSign::Lower } => -scale * t.powf(-1.0 / tail_index),
            Mixture { components } => mixture_quantile(self, components, t)?,
            Truncated { inner, low, high } => {
                let lo = inner.cdf_left(*low);
                let hi = inner.cdf(*high);
                let s = (lo + t * (hi - lo)).clamp(f64::MIN_POSITIVE, 1.0);
                inner.quantile(s)?.clamp(*low, *high)
            }
        };
        if q.is_nan() {
            return Err(Error::BadLevel(t));
        }
        Ok(q)
    }

    /// Maps one uniform on `(0, 1)` to one draw.
    ///
    /// Continuous and finite families use their quantile function; mixtures
    /// select a component with `u` and reuse the rescaled remainder of `u`
    /// inside the component, so every draw consumes exactly one uniform.
    pub fn transform_uniform(&self, u: f64) -> Result<f64> {
        match self {
            DistributionSpec::Mixture { components } => {
                let mut acc = 0.0;
                let mut last = None;
                for (w, c) in components {
                    if *w <= 0.0 {
                        continue;
                    }
                    last = Some((acc, *w, c));
                    if u < acc + w {
                        let inner = ((u - acc) / w).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
                        return c.transform_uniform(inner);
                    }
                    acc += w;
                }
                let (start, w, c) = last.ok_or(Error::EmptyInput)?;
                let inner = ((u - start) / w).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
                c.transform_uniform(inner)
            }
            DistributionSpec::Truncated { inner, low, high } => {
                let lo = inner.cdf_left(*low);
                let hi = inner.cdf(*high);
                let s = (lo + u * (hi - lo)).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
                Ok(inner.transform_truncated(s)?.clamp(*low, *high))
            }
            _ => self.quantile(u),
        }
    }

    fn transform_truncated(&self, s: f64) -> Result<f64> {
        match self {
            DistributionSpec::Mixture { .. } => self.quantile(s),
            _ => self.transform_uniform(s),
        }
    }

    /// Infimum of the support intersected with `[x, ∞)`; `+∞` when empty.
    fn support_inf_from(&self, x: f64) -> f64 {
        use DistributionSpec::*;
        match self {
            PointMass { c } => {
                if *c >= x {
                    *c
                } else {
                    f64::INFINITY
                }
            }
            FiniteDiscrete { atoms } => {
                let k = atoms.values().partition_point(|&v| v < x);
                atoms.values().get(k).copied().unwrap_or(f64::INFINITY)
            }
            Normal { .. } => x,
            LogNormal { .. } => x.max(0.0),
            ParetoTail { scale, sign: TailSign::Upper, .. } => x.max(*scale),
            ParetoTail { scale, sign: TailSign::Lower, .. } => {
                if x <= -scale {
                    x
                } else {
                    f64::INFINITY
                }
            }
            Mixture { components } => components
                .iter()
                .filter(|(w, _)| *w > 0.0)
                .map(|(_, c)| c.support_inf_from(x))
                .fold(f64::INFINITY, f64::min),
            Truncated { inner, low, high } => {
                if x > *high {
                    return f64::INFINITY;
                }
                let v = inner.support_inf_from(x.max(*low));
                if v > *high {
                    f64::INFINITY
                } else {
                    v
                }
            }
        }
    }

    /// Supremum of the support intersected with `(-∞, x]`; `-∞` when empty.
    fn support_sup_to(&self, x: f64) -> f64 {
        use DistributionSpec::*;
        match self {
            PointMass { c } => {
                if *c <= x {
                    *c
                } else {
                    f64::NEG_INFINITY
                }
            }
            FiniteDiscrete { atoms } => {
                let k = atoms.values().partition_point(|&v| v <= x);
                if k == 0 {
                    f64::NEG_INFINITY
                } else {
                    atoms.values()[k - 1]
                }
            }
            Normal { .. } => x,
            LogNormal { .. } => {
                if x >= 0.0 {
                    x
                } else {
                    f64::NEG_INFINITY
                }
            }
            ParetoTail { scale, sign: TailSign::Upper, .. } => {
                if x >= *scale {
                    x
                } else {
                    f64::NEG_INFINITY
                }
            }
            ParetoTail { scale, sign: TailSign::Lower, .. } => x.min(-scale),
            Mixture { components } => components
                .iter()
                .filter(|(w, _)| *w > 0.0)
                .map(|(_, c)| c.support_sup_to(x))
                .fold(f64::NEG_INFINITY, f64::max),
            Truncated { inner, low, high } => {
                if x < *low {
                    return f64::NEG_INFINITY;
                }
                let v = inner.support_sup_to(x.min(*high));
                if v < *low {
                    f64::NEG_INFINITY
                } else {
                    v
                }
            }
        }
    }

    /// Essential infimum (`-∞` for laws unbounded below).
    pub fn essinf(&self) -> f64 {
        self.support_inf_from(f64::NEG_INFINITY)
    }

    /// Essential supremum (`+∞` for laws unbounded above).
    pub fn esssup(&self) -> f64 {
        self.support_sup_to(f64::INFINITY)
    }

    pub fn is_bounded(&self) -> bool {
        self.essinf().is_finite() && self.esssup().is_finite()
    }

    /// `n` i.i.d. draws from stream `stream` under key `seed`, in counter order.
    pub fn draws(&self, n: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::BadCount(n));
        }
        self.validate()?;
        let mut rng = CounterRng::new(seed, stream);
        rng.uniforms(n).into_iter().map(|u| self.transform_uniform(u)).collect()
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::BadParameters(format!("{name} must be positive, got {x}")))
    }
}

fn mixture_quantile(spec: &DistributionSpec, components: &[(f64, DistributionSpec)], t: f64) -> Result<f64> {
    // The mixture quantile lies between the smallest and largest component quantiles.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (w, c) in components {
        if *w > 0.0 {
            let q = c.quantile(t)?;
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::BadLevel(t));
    }
    if spec.cdf(lo) >= t {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if spec.cdf(mid) >= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Empirical law of `n` draws (weight `1/n` each, equal draws merged).
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<EmpiricalDistribution> {
    sample_stream(spec, n, seed, 0)
}

pub fn sample_stream(spec: &DistributionSpec, n: usize, seed: u64, stream: u64) -> Result<EmpiricalDistribution> {
    EmpiricalDistribution::uniform(&spec.draws(n, seed, stream)?)
}
