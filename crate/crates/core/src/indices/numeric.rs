//! Numeric estimates of the index from the local behaviour of `δ'₊` near zero
//! and of `u` at minus infinity.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::riskcore::{DistortionSpec, ExtendedReal, UtilitySpec};

use super::{Attainment, IndexDiagnostics, IndexMethod, IndexReport};

/// Probe points `λ = 10^-k` for the distortion derivative.
const DISTORTION_EXPONENTS: std::ops::RangeInclusive<i32> = 3..=9;
/// Relative step of the central-difference fallback.
const FD_RELATIVE_STEP: f64 = 1e-12;
/// Consecutive derivative ratio within this of one counts as bounded.
const BOUNDED_RATIO_TOL: f64 = 0.01;
const RESIDUAL_LIMIT: f64 = 0.05;
/// Degree of the correction series in `λ^(1-β)`.
const CORRECTION_DEGREE: usize = 3;
const BETA_GRID_STEPS: usize = 400;
/// Plain power-law fits with an RMS residual below this are accepted as is.
const PURE_POWER_RESIDUAL: f64 = 1e-6;
/// Half-width of the search window for the corrected fit.
const BETA_WINDOW: f64 = 0.2;
const BETA_MAX: f64 = 0.95;

/// Utility probe wealth levels `x = 10^1 .. 10^6` in half decades.
fn utility_grid() -> Vec<f64> {
    (0..=10).map(|k| 10f64.powf(1.0 + 0.5 * k as f64)).collect()
}
/// Increase of the local log-log slope that signals superpolynomial decay.
const SUPERPOLY_SLOPE_RISE: f64 = 0.5;

/// Right derivative of `δ`, analytic when known, otherwise a central difference.
fn right_derivative(delta: &DistortionSpec, x: f64) -> Result<f64> {
    let v = match delta.analytic_right_derivative(x) {
        Some(v) => v,
        None => {
            let h = FD_RELATIVE_STEP * x;
            (delta.eval(x + h) - delta.eval(x - h)) / (2.0 * h)
        }
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::DerivativeUnavailable(format!("right derivative at {x} evaluated to {v}")))
    }
}

/// Index of a distortion risk measure from the singularity of `δ'₊` at zero.
///
/// A power singularity `δ'₊(λ) ~ λ^-β` gives the index `1/(1-β)`. A plain
/// log-log fit is used when it is exact; otherwise `log δ'₊` is regressed on
/// `log λ` plus a short power series in `λ^(1-β)`, which absorbs the leading
/// corrections of the compositions used by the built-in families, and `β` is
/// found by a grid search on the residual.
pub fn estimate_distortion_index(delta: &DistortionSpec) -> Result<IndexReport> {
    let lambdas: Vec<f64> = DISTORTION_EXPONENTS.map(|k| 10f64.powi(-k)).collect();
    let derivs = lambdas.iter().map(|&l| right_derivative(delta, l)).collect::<Result<Vec<_>>>()?;
    let n = derivs.len();
    let last_ratio = derivs[n - 1] / derivs[n - 2];
    if (last_ratio - 1.0).abs() <= BOUNDED_RATIO_TOL {
        return Ok(IndexReport {
            index: ExtendedReal::Finite(1.0),
            attained: Attainment::Yes,
            method: IndexMethod::NumericFit,
            diagnostics: IndexDiagnostics { fitted_exponent: Some(0.0), residual: Some(0.0), grid: lambdas },
        });
    }
    let logs_l: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let logs_d: Vec<f64> = derivs.iter().map(|d| d.ln()).collect();
    let (slope, intercept) = least_squares_line(&logs_l, &logs_d);
    let plain_sse: f64 = logs_l.iter().zip(&logs_d).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let sse = |beta: f64| series_fit_sse(&logs_l, &logs_d, beta);
    let plain_residual = (plain_sse / n as f64).sqrt();
    let (beta, residual) = if plain_residual <= PURE_POWER_RESIDUAL {
        (-slope, plain_residual)
    } else {
        // Near β = 1 the series in λ^(1-β) can mimic log λ itself, so the
        // search stays in a window around the plain estimate.
        let lo = (-slope - BETA_WINDOW).max(0.0);
        let hi = (-slope + BETA_WINDOW).min(BETA_MAX);
        let mut best = (lo, f64::INFINITY);
        for i in 0..=BETA_GRID_STEPS {
            let beta = lo + (hi - lo) * i as f64 / BETA_GRID_STEPS as f64;
            let e = sse(beta);
            if e < best.1 {
                best = (beta, e);
            }
        }
        let h = (hi - lo) / BETA_GRID_STEPS as f64;
        let beta = golden_min(sse, (best.0 - h).max(lo), (best.0 + h).min(hi));
        (beta, (sse(beta) / n as f64).sqrt())
    };
    let index = if beta >= 1.0 { f64::INFINITY } else { (1.0 / (1.0 - beta)).max(1.0) };
    let attained = if residual > RESIDUAL_LIMIT { Attainment::Unknown } else { Attainment::No };
    Ok(IndexReport {
        index: ExtendedReal::from_f64(index),
        attained,
        method: IndexMethod::NumericFit,
        diagnostics: IndexDiagnostics { fitted_exponent: Some(beta), residual: Some(residual), grid: lambdas },
    })
}

/// Residual sum of squares of `log δ' + β log λ ≈ c_0 + Σ c_k λ^(k(1-β))`.
fn series_fit_sse(logs_l: &[f64], logs_d: &[f64], beta: f64) -> f64 {
    let n = logs_l.len();
    let cols = CORRECTION_DEGREE + 1;
    let a = DMatrix::from_fn(n, cols, |i, k| ((1.0 - beta) * k as f64 * logs_l[i]).exp());
    let b = DVector::from_fn(n, |i, _| logs_d[i] + beta * logs_l[i]);
    let svd = a.clone().svd(true, true);
    match svd.solve(&b, 1e-12) {
        Ok(c) => (a * c - b).norm_squared(),
        Err(_) => f64::INFINITY,
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Index of a utility-based risk measure from the decay of `u(-x)`.
///
/// A utility that reaches `-∞`, or that never exceeds the acceptance level,
/// has index `∞`. Otherwise the log-log slope of `sup u - u(-x)` over
/// `x = 10..10^6` estimates the polynomial decay order; a slope that keeps
/// rising signals faster-than-polynomial decay and index `∞`.
pub fn estimate_utility_decay(u: &UtilitySpec) -> IndexReport {
    let grid = utility_grid();
    let infinite = |grid: Vec<f64>, slope: Option<f64>| IndexReport {
        index: ExtendedReal::PlusInfinity,
        attained: Attainment::No,
        method: IndexMethod::NumericFit,
        diagnostics: IndexDiagnostics { fitted_exponent: slope, residual: None, grid },
    };
    let top = u.sup();
    let values: Vec<f64> = grid.iter().map(|&x| u.eval(-x)).collect();
    if top.partial_cmp(&u.level_alpha) != Some(std::cmp::Ordering::Greater)
        || values.contains(&f64::NEG_INFINITY)
        || u.attains_minus_infinity()
    {
        return infinite(grid, None);
    }
    let gaps: Vec<f64> = values.iter().map(|v| top - v).collect();
    if gaps.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return IndexReport {
            index: ExtendedReal::Finite(1.0),
            attained: Attainment::Unknown,
            method: IndexMethod::NumericFit,
            diagnostics: IndexDiagnostics { fitted_exponent: None, residual: None, grid },
        };
    }
    let lx: Vec<f64> = grid.iter().map(|x| x.ln()).collect();
    let lg: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let local: Vec<f64> = (1..lx.len()).map(|i| (lg[i] - lg[i - 1]) / (lx[i] - lx[i - 1])).collect();
    let (slope, intercept) = least_squares_line(&lx, &lg);
    if local[local.len() - 1] - local[0] > SUPERPOLY_SLOPE_RISE {
        return infinite(grid, Some(slope));
    }
    let residual =
        (lx.iter().zip(&lg).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / lx.len() as f64).sqrt();
    IndexReport {
        index: ExtendedReal::Finite(slope.max(1.0)),
        attained: Attainment::Unknown,
        method: IndexMethod::NumericFit,
        diagnostics: IndexDiagnostics { fitted_exponent: Some(slope), residual: Some(residual), grid },
    }
}

fn least_squares_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
