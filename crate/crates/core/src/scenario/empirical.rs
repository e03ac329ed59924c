use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack used when comparing cumulative probabilities against a level.
pub(crate) const LEVEL_EPS: f64 = 1e-12;

/// Total weight accepted by [`EmpiricalDistribution::new`] before renormalizing.
const WEIGHT_SUM_TOL: f64 = 1e-9;

/// A probability law on the real line with finitely many atoms.
///
/// Atoms are kept sorted by value with exactly-equal values merged, so two
/// instances describing the same law have identical atom lists (up to the
/// floating-point noise of the weights).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Builds a law from `(value, weight)` pairs.
    ///
    /// Weights must be strictly positive and sum to one within `1e-9`; the
    /// result is renormalized so the stored weights sum to one.
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut total = 0.0;
        for &(v, w) in points {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue(v));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::BadWeights(format!("weight {w} is not strictly positive")));
            }
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::BadWeights(format!("weights sum to {total}, expected 1")));
        }
        let mut sorted: Vec<(f64, f64)> = points.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self::from_sorted_unchecked(sorted, total))
    }

    /// Equal-weight law over `values`.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let w = 1.0 / values.len() as f64;
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(values.len());
        for &v in values {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue(v));
            }
            pts.push((v, w));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self::from_sorted_unchecked(pts, 1.0))
    }

    /// Law of a variable taking `values[i]` with probability `probs[i]`.
    pub fn from_values_weights(values: &[f64], probs: &[f64]) -> Result<Self> {
        if values.len() != probs.len() {
            return Err(Error::DimensionMismatch { expected: probs.len(), got: values.len() });
        }
        let pts: Vec<(f64, f64)> = values.iter().copied().zip(probs.iter().copied()).collect();
        Self::new(&pts)
    }

    pub fn point_mass(c: f64) -> Result<Self> {
        Self::new(&[(c, 1.0)])
    }

    fn from_sorted_unchecked(sorted: Vec<(f64, f64)>, total: f64) -> Self {
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut weights: Vec<f64> = Vec::with_capacity(sorted.len());
        for (v, w) in sorted {
            match values.last() {
                Some(&last) if last == v => *weights.last_mut().unwrap() += w / total,
                _ => {
                    values.push(v);
                    weights.push(w / total);
                }
            }
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Self { values, weights, cumulative }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Atom locations, strictly increasing.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `F(x_i)` at every atom; the last entry is exactly one.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn atoms(&self) -> impl DoubleEndedIterator<Item = (f64, f64)> + ExactSizeIterator + '_ {
        self.values.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(v, w)| v * w).sum()
    }

    /// Right-continuous distribution function `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Left limit of the distribution function, `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v < x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Lower quantile `inf{x : F(x) >= t}` for `t` in `(0, 1]`.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::BadLevel(t));
        }
        let k = self.cumulative.partition_point(|&c| c < t - LEVEL_EPS);
        Ok(self.values[k.min(self.values.len() - 1)])
    }

    /// Upper quantile `inf{x : F(x) > t}` for `t` in `[0, 1)`.
    pub fn upper_quantile(&self, t: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::BadLevel(t));
        }
        let k = self.cumulative.partition_point(|&c| c <= t + LEVEL_EPS);
        Ok(self.values[k.min(self.values.len() - 1)])
    }

    /// Equality of laws: same atom count, values and weights within `tol`.
    pub fn same_law(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .atoms()
                .zip(other.atoms())
                .all(|((v1, w1), (v2, w2))| (v1 - v2).abs() <= tol && (w1 - w2).abs() <= tol)
    }

    /// `E[|X|^p] / p`, the integral of `psi_p`.
    pub fn psi_p_moment(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::BadExponent(p));
        }
        Ok(self.atoms().map(|(v, w)| w * v.abs().powf(p)).sum::<f64>() / p)
    }

    /// Law of `-X`.
    pub fn negated(&self) -> Self {
        let pts: Vec<(f64, f64)> = self.atoms().rev().map(|(v, w)| (-v, w)).collect();
        Self::from_sorted_unchecked(pts, 1.0)
    }

    /// Law of `a * X + b` for `a >= 0`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::BadParameters(format!("affine map needs finite a >= 0, got a={a}, b={b}")));
        }
        let pts: Vec<(f64, f64)> = self.atoms().map(|(v, w)| (a * v + b, w)).collect();
        Ok(Self::from_sorted_unchecked(pts, 1.0))
    }
}

impl TryFrom<Vec<(f64, f64)>> for EmpiricalDistribution {
    type Error = Error;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(&points)
    }
}

impl From<EmpiricalDistribution> for Vec<(f64, f64)> {
    fn from(d: EmpiricalDistribution) -> Self {
        d.atoms().collect()
    }
}

/// `∫_0^1 q_a(t) q_b(t) dt` for two laws, i.e. the expectation of the product
/// under the comonotone coupling, evaluated exactly on the merged partition of
/// `(0, 1]` induced by both quantile functions.
pub fn comonotone_product(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (ca, cb) = (a.cumulative(), b.cumulative());
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = 0.0;
    let mut acc = 0.0;
    while i < ca.len() && j < cb.len() {
        let next = ca[i].min(cb[j]);
        acc += (next - prev) * a.values()[i] * b.values()[j];
        prev = next;
        if ca[i] <= next {
            i += 1;
        }
        if cb[j] <= next {
            j += 1;
        }
    }
    acc
}
