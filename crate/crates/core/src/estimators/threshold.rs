use std::f64::consts::LN_2;

use super::Estimate;
use crate::measurement::EigFit;
use crate::{Error, Result};

/// `G = √(2·ln2·ln N / (λ·ε))` with `ε = 1/(50(B+σ)²)` and amplitude bound
/// `B = 1/√M`.
///
/// This is the unlinearized threshold. It exceeds the calibrated
/// [`ThresholdModel`] by exactly `√λ`: the linearized constants divide by
/// `λ(N)` rather than by its square root.
pub fn hn_threshold_raw(m: usize, n: usize, sigma: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("spectral bound {lambda} must be positive")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!("noise sigma {sigma} must be ≥ 0")));
    }
    if m == 0 || n == 0 {
        return Err(Error::Domain("M and N must be positive".into()));
    }
    let bound = 1.0 / (m as f64).sqrt();
    let epsilon = 1.0 / (50.0 * (bound + sigma).powi(2));
    Ok((2.0 * LN_2 * (n as f64).ln() / (lambda * epsilon)).sqrt())
}

/// Threshold linear in the noise level: `G(σ) = (a + σ)·b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdModel {
    pub a: f64,
    pub b: f64,
    pub m: usize,
    pub n: usize,
}

impl ThresholdModel {
    pub fn new(a: f64, b: f64, m: usize, n: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!(
                "threshold model needs a > 0 and b > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(ThresholdModel { a, b, m, n })
    }

    pub fn eval(&self, sigma: f64) -> f64 {
        (self.a + sigma) * self.b
    }
}

/// Linearizes the threshold at `(M, N)` using the fitted `λ(N)`.
///
/// `a = 1/√M` and `b = √(2·ln2·50·ln N) / λ(N)`; with the reference fit
/// `λ(N) = 18.81 − 0.064·N` at `M = 200, N = 100` this gives
/// `G = 1.4397·(σ + 0.0707)`.
pub fn calibrate_threshold_model(m: usize, n: usize, fit: &EigFit) -> Result<ThresholdModel> {
    calibrate_threshold_model_with_base(m, n, fit, std::f64::consts::E)
}

/// [`calibrate_threshold_model`] with both logarithms taken in `base`.
pub fn calibrate_threshold_model_with_base(
    m: usize,
    n: usize,
    fit: &EigFit,
    base: f64,
) -> Result<ThresholdModel> {
    if !(base > 1.0) || !base.is_finite() {
        return Err(Error::Domain(format!("logarithm base {base} must exceed 1")));
    }
    if fit.m != m {
        return Err(Error::Domain(format!(
            "eigenvalue fit was computed for M = {}, not {m}",
            fit.m
        )));
    }
    if n < 2 {
        return Err(Error::Domain(format!("delay spread {n} below 2")));
    }
    let lambda = fit.lambda_at(n);
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "fitted spectral bound λ({n}) = {lambda} is not positive"
        )));
    }
    let a = 1.0 / (m as f64).sqrt();
    let log = |x: f64| x.ln() / base.ln();
    let b = (2.0 * log(2.0) * 50.0 * log(n as f64)).sqrt() / lambda;
    ThresholdModel::new(a, b, m, n)
}

/// Thresholds spanning the range of an initial estimate, shaped by the
/// threshold model over a noise range.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSet {
    /// `t(1) … t(N_t)`.
    pub thresholds: Vec<f64>,
    /// Quantized model levels `G_1 … G_{N_t}`.
    pub levels: Vec<f64>,
    pub sigma_low: f64,
    pub sigma_high: f64,
    /// Amplitude step `max|ĥ⁽⁰⁾| / N_t`.
    pub delta: f64,
}

impl ThresholdSet {
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }
}

/// Builds `t(i) = G_i·(i·Δ) / max G` for `i = 1 … N_t`.
///
/// `G_i` evaluates the model on `N_t` evenly spaced noise levels from
/// `σ_l` to `σ_h`, and `Δ = max|ĥ⁽⁰⁾| / N_t`, so `i·Δ` sweeps up to the
/// largest initial amplitude.
pub fn threshold_set(
    initial: &Estimate,
    model: &ThresholdModel,
    sigma_range: (f64, f64),
    n_t: usize,
) -> Result<ThresholdSet> {
    let (sigma_low, sigma_high) = sigma_range;
    if !(sigma_low >= 0.0 && sigma_low <= sigma_high) || !sigma_high.is_finite() {
        return Err(Error::Domain(format!(
            "noise range [{sigma_low}, {sigma_high}] is invalid"
        )));
    }
    if n_t < 2 {
        return Err(Error::Domain(format!("need at least 2 thresholds, got {n_t}")));
    }
    let peak = initial.max_abs();
    if peak == 0.0 {
        return Err(Error::Degenerate("initial estimate is identically zero".into()));
    }
    let step = (sigma_high - sigma_low) / (n_t - 1) as f64;
    let levels: Vec<f64> = (0..n_t)
        .map(|i| model.eval(sigma_low + i as f64 * step))
        .collect();
    let top = levels.iter().cloned().fold(f64::MIN, f64::max);
    let delta = peak / n_t as f64;
    let thresholds = levels
        .iter()
        .enumerate()
        .map(|(i, g)| g * ((i + 1) as f64 * delta) / top)
        .collect();
    Ok(ThresholdSet {
        thresholds,
        levels,
        sigma_low,
        sigma_high,
        delta,
    })
}
