//! Acceptance-set specifications and their building blocks.

use std::fmt;
use std::sync::Arc;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{EmpiricalDistribution, ScenarioSpace};

/// A value in `[-∞, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl ExtendedReal {
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtendedReal::PlusInfinity
        } else if x == f64::NEG_INFINITY {
            ExtendedReal::MinusInfinity
        } else {
            ExtendedReal::Finite(x)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => x,
            ExtendedReal::PlusInfinity => f64::INFINITY,
            ExtendedReal::MinusInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::PlusInfinity => f.write_str("+inf"),
            ExtendedReal::MinusInfinity => f.write_str("-inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => s.serialize_f64(*x),
            ExtendedReal::PlusInfinity => s.serialize_str("+inf"),
            ExtendedReal::MinusInfinity => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(ExtendedReal::Finite(x)),
            Repr::Str(s) if s == "+inf" || s == "inf" => Ok(ExtendedReal::PlusInfinity),
            Repr::Str(s) if s == "-inf" => Ok(ExtendedReal::MinusInfinity),
            Repr::Str(s) => Err(de::Error::custom(format!("not an extended real: {s}"))),
        }
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied real function; compared by identity.
#[derive(Clone)]
pub struct CustomFn(RealFn);

impl CustomFn {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        CustomFn(Arc::new(f))
    }

    pub fn call(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomFn(..)")
    }
}

impl PartialEq for CustomFn {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

// ---------------------------------------------------------------------------
// Utilities

/// Utility families. `Custom` is available from code only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum UtilityFamily {
    /// `1 - exp(-gamma x)`.
    Exponential { gamma: f64 },
    /// `-|x|^q` on the negative half-line, zero elsewhere.
    FlatPower { q: f64 },
    /// `log(1 + x)` on `[0, c)`, capped at `log(1 + c)`, `-∞` for negative wealth.
    CappedLog { c: f64 },
    /// `(1 + a x - sqrt(1 + a² x²)) / a` below `c`, constant above.
    NonHara { a: f64, c: f64 },
    #[serde(skip)]
    Custom(CustomFn),
}

/// An increasing, concave, bounded-above utility together with the level
/// `level_alpha` that expected utility has to reach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUtilitySpec")]
pub struct UtilitySpec {
    pub family: UtilityFamily,
    pub level_alpha: f64,
}

#[derive(Deserialize)]
struct RawUtilitySpec {
    family: UtilityFamily,
    level_alpha: f64,
}

impl TryFrom<RawUtilitySpec> for UtilitySpec {
    type Error = Error;

    fn try_from(raw: RawUtilitySpec) -> Result<Self> {
        UtilitySpec::new(raw.family, raw.level_alpha)
    }
}

/// Grid used to check monotonicity and concavity of utilities.
const UTILITY_SHAPE_GRID: usize = 64;
const UTILITY_SHAPE_RANGE: f64 = 20.0;
/// Large wealth used to probe the upper bound of a utility.
pub(crate) const UTILITY_UPPER_PROBE: f64 = 1e9;

impl UtilitySpec {
    pub fn new(family: UtilityFamily, level_alpha: f64) -> Result<Self> {
        let bad = |m: String| Err(Error::BadParameters(m));
        match &family {
            UtilityFamily::Exponential { gamma } if !(gamma.is_finite() && *gamma > 0.0) => {
                return bad(format!("exponential utility needs gamma > 0, got {gamma}"))
            }
            UtilityFamily::FlatPower { q } if !(q.is_finite() && *q >= 1.0) => {
                return bad(format!("flat power utility needs q >= 1, got {q}"))
            }
            UtilityFamily::CappedLog { c } if !(c.is_finite() && *c > 0.0) => {
                return bad(format!("capped log utility needs c > 0, got {c}"))
            }
            UtilityFamily::NonHara { a, c } if !(a.is_finite() && *a > 0.0 && c.is_finite() && *c >= 0.0) => {
                return bad(format!("non-HARA utility needs a > 0 and c >= 0, got a={a}, c={c}"))
            }
            _ => {}
        }
        if !level_alpha.is_finite() {
            return Err(Error::NonFiniteValue(level_alpha));
        }
        let spec = UtilitySpec { family, level_alpha };
        spec.check_shape()?;
        let top = spec.eval(UTILITY_UPPER_PROBE);
        if !top.is_finite() {
            return bad("utility must be bounded above (finite at 1e9)".into());
        }
        if top < level_alpha {
            return bad(format!("acceptance set is empty: u(x) < {level_alpha} for all probed x"));
        }
        Ok(spec)
    }

    fn check_shape(&self) -> Result<()> {
        let n = UTILITY_SHAPE_GRID;
        let xs: Vec<f64> =
            (0..n).map(|i| -UTILITY_SHAPE_RANGE + 2.0 * UTILITY_SHAPE_RANGE * i as f64 / (n - 1) as f64).collect();
        let us: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();
        if us.iter().any(|u| u.is_nan() || *u == f64::INFINITY) {
            return Err(Error::BadParameters("utility returned NaN or +inf on the test grid".into()));
        }
        check_increasing_concave(&xs, &us).map_err(|m| Error::BadParameters(format!("utility {m}")))
    }

    /// `u(x)`, possibly `-∞`.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.family {
            UtilityFamily::Exponential { gamma } => -(-gamma * x).exp_m1(),
            UtilityFamily::FlatPower { q } => {
                if x < 0.0 {
                    -(-x).powf(*q)
                } else {
                    0.0
                }
            }
            UtilityFamily::CappedLog { c } => {
                if x >= *c {
                    c.ln_1p()
                } else if x >= 0.0 {
                    x.ln_1p()
                } else {
                    f64::NEG_INFINITY
                }
            }
            UtilityFamily::NonHara { a, c } => non_hara(*a, x.min(*c)),
            UtilityFamily::Custom(f) => f.call(x),
        }
    }

    /// `sup_x u(x)`.
    pub fn sup(&self) -> f64 {
        match &self.family {
            UtilityFamily::Exponential { .. } => 1.0,
            UtilityFamily::FlatPower { .. } => 0.0,
            UtilityFamily::CappedLog { c } => c.ln_1p(),
            UtilityFamily::NonHara { a, c } => non_hara(*a, *c),
            UtilityFamily::Custom(f) => f.call(UTILITY_UPPER_PROBE),
        }
    }

    /// Whether `u` takes the value `-∞` somewhere. For custom utilities this
    /// is decided on a probe grid reaching down to `-1e9`.
    pub fn attains_minus_infinity(&self) -> bool {
        match &self.family {
            UtilityFamily::CappedLog { .. } => true,
            UtilityFamily::Custom(f) => {
                let probes = (0..=9).map(|k| -(10f64.powi(k))).chain([-1e-9, -1e-6, -1e-3]);
                probes.into_iter().any(|x| f.call(x) == f64::NEG_INFINITY && x.is_finite() && {
                    // Distinguish a genuine -∞ from overflow of a fast-decaying utility.
                    let mut y = x;
                    let mut hit = true;
                    for _ in 0..3 {
                        y /= 10.0;
                        hit &= f.call(y) == f64::NEG_INFINITY || y.abs() < 1e-12;
                    }
                    hit || x.abs() <= 10.0
                })
            }
            _ => false,
        }
    }

    /// Whether some wealth level strictly exceeds the acceptance level.
    pub fn exceeds_level_somewhere(&self) -> bool {
        self.sup() > self.level_alpha
    }

    /// Whether no position reaches the level, however much capital is
    /// added: the level lies above `sup u`, or at a supremum that is not
    /// attained.
    pub fn level_unreachable(&self) -> bool {
        let sup = self.sup();
        self.level_alpha > sup || (self.level_alpha == sup && matches!(self.family, UtilityFamily::Exponential { .. }))
    }
}

fn non_hara(a: f64, x: f64) -> f64 {
    let r = (1.0 + a * a * x * x).sqrt();
    if x > 0.0 {
        // 1 + ax - sqrt(1 + a²x²) = 1 - 1 / (ax + sqrt(1 + a²x²))
        (1.0 - 1.0 / (a * x + r)) / a
    } else {
        (1.0 + a * x - r) / a
    }
}

fn check_increasing_concave(xs: &[f64], ys: &[f64]) -> std::result::Result<(), String> {
    for i in 1..xs.len() {
        if ys[i] < ys[i - 1] {
            return Err(format!("is not increasing near {}", xs[i]));
        }
    }
    let finite_from = ys.iter().position(|y| y.is_finite()).unwrap_or(ys.len());
    let slopes: Vec<f64> = (finite_from + 1..xs.len())
        .map(|i| (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]))
        .collect();
    for w in slopes.windows(2) {
        let scale = 1.0f64.max(w[0].abs()).max(w[1].abs());
        if w[1] > w[0] + 1e-9 * scale {
            return Err("is not concave on the test grid".into());
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Distortions

/// Concave distortion of a distribution function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DistortionFamily {
    /// `x^(1/gamma)`.
    MaxVar { gamma: f64 },
    /// `1 - (1 - x)^gamma`.
    MinVar { gamma: f64 },
    /// `(1 - (1 - x)^gamma)^(1/gamma)`.
    MaxMinVar { gamma: f64 },
    /// `1 - (1 - x^(1/gamma))^gamma`.
    MinMaxVar { gamma: f64 },
    /// `1 - (1 - x^(1/beta))^gamma`.
    BetaGamma { beta: f64, gamma: f64 },
    /// `log(1 + x) / log 2`.
    LogDistortion,
    #[serde(skip)]
    Custom { distortion: CustomFn, right_derivative: Option<CustomFn> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistortionSpec")]
pub struct DistortionSpec {
    pub family: DistortionFamily,
}

#[derive(Deserialize)]
struct RawDistortionSpec {
    family: DistortionFamily,
}

impl TryFrom<RawDistortionSpec> for DistortionSpec {
    type Error = Error;

    fn try_from(raw: RawDistortionSpec) -> Result<Self> {
        DistortionSpec::new(raw.family)
    }
}

const DISTORTION_GRID: usize = 1024;
const DISTORTION_ENDPOINT_TOL: f64 = 1e-12;

impl DistortionSpec {
    pub fn new(family: DistortionFamily) -> Result<Self> {
        let at_least_one = |name: &str, v: f64| {
            if v.is_finite() && v >= 1.0 {
                Ok(())
            } else {
                Err(Error::BadParameters(format!("{name} must be >= 1, got {v}")))
            }
        };
        match &family {
            DistortionFamily::MaxVar { gamma }
            | DistortionFamily::MinVar { gamma }
            | DistortionFamily::MaxMinVar { gamma }
            | DistortionFamily::MinMaxVar { gamma } => at_least_one("gamma", *gamma)?,
            DistortionFamily::BetaGamma { beta, gamma } => {
                at_least_one("beta", *beta)?;
                at_least_one("gamma", *gamma)?;
            }
            _ => {}
        }
        let spec = DistortionSpec { family };
        spec.check_shape()?;
        Ok(spec)
    }

    /// Identity distortion, `δ(x) = x`.
    pub fn identity() -> Self {
        DistortionSpec { family: DistortionFamily::MaxVar { gamma: 1.0 } }
    }

    fn check_shape(&self) -> Result<()> {
        let d0 = self.eval(0.0);
        let d1 = self.eval(1.0);
        if (d0).abs() > DISTORTION_ENDPOINT_TOL || (d1 - 1.0).abs() > DISTORTION_ENDPOINT_TOL {
            return Err(Error::BadParameters(format!("distortion must map 0 to 0 and 1 to 1, got {d0}, {d1}")));
        }
        let n = DISTORTION_GRID;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::BadParameters("distortion is not finite on [0, 1]".into()));
        }
        check_increasing_concave(&xs, &ys).map_err(|m| Error::BadParameters(format!("distortion {m}")))
    }

    /// `δ(x)` for `x` in `[0, 1]` (inputs are clamped).
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match &self.family {
            DistortionFamily::MaxVar { gamma } => x.powf(1.0 / gamma),
            DistortionFamily::MinVar { gamma } => 1.0 - (1.0 - x).powf(*gamma),
            DistortionFamily::MaxMinVar { gamma } => (1.0 - (1.0 - x).powf(*gamma)).powf(1.0 / gamma),
            DistortionFamily::MinMaxVar { gamma } => 1.0 - (1.0 - x.powf(1.0 / gamma)).powf(*gamma),
            DistortionFamily::BetaGamma { beta, gamma } => 1.0 - (1.0 - x.powf(1.0 / beta)).powf(*gamma),
            DistortionFamily::LogDistortion => x.ln_1p() / std::f64::consts::LN_2,
            DistortionFamily::Custom { distortion, .. } => distortion.call(x),
        }
    }

    /// Closed-form right derivative on `(0, 1)`, when one is known.
    pub fn analytic_right_derivative(&self, x: f64) -> Option<f64> {
        let v = match &self.family {
            DistortionFamily::MaxVar { gamma } => x.powf(1.0 / gamma - 1.0) / gamma,
            DistortionFamily::MinVar { gamma } => gamma * (1.0 - x).powf(gamma - 1.0),
            DistortionFamily::MaxMinVar { gamma } => {
                let s = 1.0 - (1.0 - x).powf(*gamma);
                s.powf(1.0 / gamma - 1.0) * (1.0 - x).powf(gamma - 1.0)
            }
            DistortionFamily::MinMaxVar { gamma } => {
                let y = x.powf(1.0 / gamma);
                (1.0 - y).powf(gamma - 1.0) * y / x
            }
            DistortionFamily::BetaGamma { beta, gamma } => {
                let y = x.powf(1.0 / beta);
                gamma / beta * (1.0 - y).powf(gamma - 1.0) * y / x
            }
            DistortionFamily::LogDistortion => 1.0 / (std::f64::consts::LN_2 * (1.0 + x)),
            DistortionFamily::Custom { right_derivative, .. } => return right_derivative.as_ref().map(|f| f.call(x)),
        };
        Some(v)
    }

    /// TVaR at level `alpha` as a distortion, `min(x / alpha, 1)`.
    pub fn tvar(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::BadLevel(alpha));
        }
        DistortionSpec::new(DistortionFamily::Custom {
            distortion: CustomFn::new(move |x| (x / alpha).min(1.0)),
            right_derivative: Some(CustomFn::new(move |x| if x < alpha { 1.0 / alpha } else { 0.0 })),
        })
    }
}

// ---------------------------------------------------------------------------
// Densities

/// Law of a Radon-Nikodym density `dQ/dP`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", try_from = "RawDensitySpec")]
pub enum DensitySpec {
    /// Density values on the states of a finite space with probabilities `probs`.
    EmpiricalDensity { values: Vec<f64>, probs: Vec<f64> },
    /// Decreasing quantile profile `t ↦ c_r t^(-1/r)` on `(0, 1]` with
    /// `c_r = (r - 1) / r`; it lies in `L^s` exactly for `s < r`.
    QuantilePower { r: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "kind")]
enum RawDensitySpec {
    EmpiricalDensity { values: Vec<f64>, probs: Vec<f64> },
    QuantilePower { r: f64 },
}

impl TryFrom<RawDensitySpec> for DensitySpec {
    type Error = Error;

    fn try_from(raw: RawDensitySpec) -> Result<Self> {
        match raw {
            RawDensitySpec::EmpiricalDensity { values, probs } => DensitySpec::empirical(values, probs),
            RawDensitySpec::QuantilePower { r } => DensitySpec::quantile_power(r),
        }
    }
}

const DENSITY_MEAN_TOL: f64 = 1e-10;

impl DensitySpec {
    pub fn empirical(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.len() != probs.len() {
            return Err(Error::DimensionMismatch { expected: probs.len(), got: values.len() });
        }
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::BadDensity("density values must be finite and nonnegative".into()));
        }
        let law = EmpiricalDistribution::from_values_weights(&values, &probs)?;
        let mean = law.mean();
        if (mean - 1.0).abs() > DENSITY_MEAN_TOL {
            return Err(Error::BadDensity(format!("density has mean {mean}, expected 1")));
        }
        Ok(DensitySpec::EmpiricalDensity { values, probs })
    }

    /// Density given by a variable of a scenario space.
    pub fn from_space(space: &ScenarioSpace, var: &str) -> Result<Self> {
        Self::empirical(space.var(var)?.to_vec(), space.probs().to_vec())
    }

    pub fn quantile_power(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 1.0) {
            return Err(Error::BadDensity(format!("quantile power needs r > 1, got {r}")));
        }
        Ok(DensitySpec::QuantilePower { r })
    }

    /// Constant density one (`Q = P`).
    pub fn unit() -> Self {
        DensitySpec::EmpiricalDensity { values: vec![1.0], probs: vec![1.0] }
    }

    /// Law of the density, for the finite variant.
    pub fn law(&self) -> Option<EmpiricalDistribution> {
        match self {
            DensitySpec::EmpiricalDensity { values, probs } => EmpiricalDistribution::from_values_weights(values, probs).ok(),
            DensitySpec::QuantilePower { .. } => None,
        }
    }

    /// `‖D‖_s` for `s` in `[1, ∞]`.
    pub fn norm(&self, s: f64) -> f64 {
        match self {
            DensitySpec::EmpiricalDensity { values, probs } => {
                if s.is_infinite() {
                    values.iter().copied().fold(0.0, f64::max)
                } else {
                    values.iter().zip(probs).map(|(d, p)| p * d.powf(s)).sum::<f64>().powf(1.0 / s)
                }
            }
            DensitySpec::QuantilePower { r } => {
                if s >= *r {
                    f64::INFINITY
                } else {
                    let c = (r - 1.0) / r;
                    (c.powf(s) / (1.0 - s / r)).powf(1.0 / s)
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Acceptance sets

/// The supported families of law-invariant, convex acceptance sets.
///
/// JSON form: an object whose `variant` field names the family, e.g.
/// `{"variant":"TVaRLevel","alpha":0.05}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum AcceptanceSpec {
    /// `E[X] >= alpha`.
    ExpectationFloor { alpha: f64 },
    /// `TVaR_alpha(X) <= 0`.
    TVaRLevel { alpha: f64 },
    /// `E[u(X)] >= level_alpha`.
    UtilityFloor { utility: UtilitySpec },
    /// `ρ_δ(X) <= 0`.
    Distortion { distortion: DistortionSpec },
    /// `E[XY] >= 0` for every `Y` distributed like the density.
    MaxCorrelation { density: DensitySpec },
}

impl AcceptanceSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            AcceptanceSpec::ExpectationFloor { alpha } if !alpha.is_finite() => Err(Error::NonFiniteValue(*alpha)),
            AcceptanceSpec::TVaRLevel { alpha } if !(*alpha > 0.0 && *alpha < 1.0) => Err(Error::BadLevel(*alpha)),
            _ => Ok(()),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: AcceptanceSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Whether the set is a cone, so that the associated risk measure is positively homogeneous.
    pub fn is_coherent(&self) -> bool {
        matches!(
            self,
            AcceptanceSpec::TVaRLevel { .. } | AcceptanceSpec::Distortion { .. } | AcceptanceSpec::MaxCorrelation { .. }
        ) || matches!(self, AcceptanceSpec::ExpectationFloor { alpha } if *alpha == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_real_json() {
        assert_eq!(serde_json::to_string(&ExtendedReal::PlusInfinity).unwrap(), "\"+inf\"");
        assert_eq!(serde_json::to_string(&ExtendedReal::MinusInfinity).unwrap(), "\"-inf\"");
        assert_eq!(serde_json::to_string(&ExtendedReal::Finite(1.5)).unwrap(), "1.5");
        let back: ExtendedReal = serde_json::from_str("\"-inf\"").unwrap();
        assert_eq!(back, ExtendedReal::MinusInfinity);
        assert_eq!(ExtendedReal::from_f64(f64::INFINITY), ExtendedReal::PlusInfinity);
    }

    #[test]
    fn utility_values() {
        let cl = UtilitySpec::new(UtilityFamily::CappedLog { c: 1.0 }, 0.0).unwrap();
        assert_eq!(cl.eval(-0.5), f64::NEG_INFINITY);
        assert!((cl.eval(5.0) - 2f64.ln()).abs() < 1e-15);
        assert!(cl.attains_minus_infinity());
        let fp = UtilitySpec::new(UtilityFamily::FlatPower { q: 2.0 }, -1.0).unwrap();
        assert_eq!(fp.eval(-2.0), -4.0);
        assert_eq!(fp.eval(3.0), 0.0);
        let ex = UtilitySpec::new(UtilityFamily::Exponential { gamma: 1.0 }, 0.0).unwrap();
        assert_eq!(ex.eval(0.0), 0.0);
        assert!(!ex.attains_minus_infinity());
        let nh = UtilitySpec::new(UtilityFamily::NonHara { a: 1.0, c: 2.0 }, -1.0).unwrap();
        let cap = (1.0 + 2.0 - 5f64.sqrt()) / 1.0;
        assert!((nh.eval(10.0) - cap).abs() < 1e-14);
        assert!((nh.eval(1.0) - (2.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((nh.sup() - cap).abs() < 1e-14);
    }

    #[test]
    fn utility_validation() {
        assert!(UtilitySpec::new(UtilityFamily::Exponential { gamma: 0.0 }, 0.0).is_err());
        assert!(UtilitySpec::new(UtilityFamily::FlatPower { q: 0.5 }, -1.0).is_err());
        // Level above sup u: acceptance set empty.
        assert!(UtilitySpec::new(UtilityFamily::Exponential { gamma: 1.0 }, 2.0).is_err());
        // Convex custom function is rejected.
        assert!(UtilitySpec::new(UtilityFamily::Custom(CustomFn::new(|x: f64| x * x.abs())), -1.0).is_err());
        let custom = UtilityFamily::Custom(CustomFn::new(|x: f64| if x < 0.0 { -x * x } else { 0.0 }));
        assert!(UtilitySpec::new(custom, -1.0).is_ok());
    }

    #[test]
    fn distortion_families_validate() {
        for g in [1.0, 1.5, 2.0, 3.0, 5.0] {
            for fam in [
                DistortionFamily::MaxVar { gamma: g },
                DistortionFamily::MinVar { gamma: g },
                DistortionFamily::MaxMinVar { gamma: g },
                DistortionFamily::MinMaxVar { gamma: g },
                DistortionFamily::BetaGamma { beta: g, gamma: 2.0 },
            ] {
                DistortionSpec::new(fam).unwrap();
            }
        }
        DistortionSpec::new(DistortionFamily::LogDistortion).unwrap();
        assert!(DistortionSpec::new(DistortionFamily::MaxVar { gamma: 0.5 }).is_err());
        let convex = DistortionFamily::Custom { distortion: CustomFn::new(|x| x * x), right_derivative: None };
        assert!(DistortionSpec::new(convex).is_err());
        DistortionSpec::tvar(0.1).unwrap();
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        for fam in [
            DistortionFamily::MaxVar { gamma: 3.0 },
            DistortionFamily::MinVar { gamma: 2.5 },
            DistortionFamily::MaxMinVar { gamma: 2.0 },
            DistortionFamily::MinMaxVar { gamma: 3.0 },
            DistortionFamily::BetaGamma { beta: 2.0, gamma: 3.0 },
            DistortionFamily::LogDistortion,
        ] {
            let d = DistortionSpec::new(fam).unwrap();
            for x in [0.01, 0.3, 0.7] {
                let h = 1e-6;
                let fd = (d.eval(x + h) - d.eval(x - h)) / (2.0 * h);
                let an = d.analytic_right_derivative(x).unwrap();
                assert!((fd - an).abs() < 1e-6 * an.max(1.0), "{:?} at {x}: {fd} vs {an}", d.family);
            }
        }
    }

    #[test]
    fn density_validation_and_norms() {
        let d = DensitySpec::empirical(vec![0.3, 1.5, 1.2], vec![1.0 / 3.0; 3]).unwrap();
        assert_eq!(d.norm(f64::INFINITY), 1.5);
        assert!(DensitySpec::empirical(vec![0.5, 0.5], vec![0.5, 0.5]).is_err());
        assert!(DensitySpec::quantile_power(1.0).is_err());
        let qp = DensitySpec::quantile_power(3.0).unwrap();
        assert_eq!(qp.norm(3.0), f64::INFINITY);
        assert!((qp.norm(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn acceptance_json() {
        let a = AcceptanceSpec::from_json(r#"{"variant":"TVaRLevel","alpha":0.05}"#).unwrap();
        assert_eq!(a, AcceptanceSpec::TVaRLevel { alpha: 0.05 });
        assert!(AcceptanceSpec::from_json(r#"{"variant":"TVaRLevel","alpha":1.5}"#).is_err());
        let u = AcceptanceSpec::from_json(
            r#"{"variant":"UtilityFloor","utility":{"family":{"kind":"Exponential","gamma":1},"level_alpha":0}}"#,
        )
        .unwrap();
        assert!(matches!(u, AcceptanceSpec::UtilityFloor { .. }));
        let d = AcceptanceSpec::from_json(r#"{"variant":"Distortion","distortion":{"family":{"kind":"MaxVar","gamma":2}}}"#)
            .unwrap();
        assert!(matches!(d, AcceptanceSpec::Distortion { .. }));
        let m = AcceptanceSpec::from_json(r#"{"variant":"MaxCorrelation","density":{"kind":"QuantilePower","r":3}}"#)
            .unwrap();
        assert!(matches!(m, AcceptanceSpec::MaxCorrelation { .. }));
        assert!(AcceptanceSpec::from_json(r#"{"variant":"MaxCorrelation","density":{"kind":"QuantilePower","r":0.5}}"#)
            .is_err());
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(AcceptanceSpec::from_json(&s).unwrap(), m);
    }
}
