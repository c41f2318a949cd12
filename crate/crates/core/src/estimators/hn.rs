use nalgebra::{DMatrix, DVector};

use super::Estimate;
use crate::measurement::EffectiveMatrix;
use crate::{Error, Result};

/// Parameters of the thresholded gradient iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HnConfig {
    /// Largest admissible signal amplitude `B`.
    pub amplitude_bound: f64,
    /// Noise standard deviation.
    pub sigma: f64,
    /// Step bound; must dominate the top eigenvalue of `AᵀA`.
    pub lambda: f64,
    /// The applied threshold is `G / divisor`.
    pub divisor: f64,
    pub max_iters: usize,
    /// Sup-norm change between iterates that counts as a fixed point.
    pub fixpoint_tol: f64,
}

impl HnConfig {
    pub const DEFAULT_MAX_ITERS: usize = 500;
    pub const DEFAULT_FIXPOINT_TOL: f64 = 1e-8;

    /// Defaults for a training length `m`: `B = 1/√m`, divisor 1.
    pub fn new(m: usize, sigma: f64, lambda: f64) -> Self {
        HnConfig {
            amplitude_bound: 1.0 / (m.max(1) as f64).sqrt(),
            sigma,
            lambda,
            divisor: 1.0,
            max_iters: Self::DEFAULT_MAX_ITERS,
            fixpoint_tol: Self::DEFAULT_FIXPOINT_TOL,
        }
    }

    pub fn with_divisor(mut self, divisor: f64) -> Self {
        self.divisor = divisor;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    /// `ε = 1/(50(B + σ)²)`.
    pub fn epsilon(&self) -> f64 {
        1.0 / (50.0 * (self.amplitude_bound + self.sigma).powi(2))
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::Domain(format!("step bound λ = {} must be positive", self.lambda)));
        }
        if !(self.divisor > 0.0) {
            return Err(Error::Domain(format!("threshold divisor {} must be positive", self.divisor)));
        }
        if !(self.fixpoint_tol > 0.0) {
            return Err(Error::Domain("fix-point tolerance must be positive".into()));
        }
        if !(self.sigma >= 0.0) || !(self.amplitude_bound > 0.0) {
            return Err(Error::Domain("σ must be ≥ 0 and B > 0".into()));
        }
        Ok(())
    }
}

/// Gram matrix and correlation `Aᵀy` cached for repeated recoveries on the
/// same measurements.
#[derive(Debug, Clone)]
pub struct HnProblem {
    gram: DMatrix<f64>,
    correlation: DVector<f64>,
}

impl HnProblem {
    pub fn new(a: &EffectiveMatrix, y: &DVector<f64>) -> Result<Self> {
        let m = a.matrix();
        let correlation = m.tr_mul_vec(y)?;
        let gram = m.tr_mul(m.as_dmatrix());
        Ok(HnProblem { gram, correlation })
    }

    pub fn dim(&self) -> usize {
        self.correlation.len()
    }

    /// Runs `χ = θ + (1/λ)Aᵀ(y − Aθ)`, keeping `χ_k` when `|χ_k| ≥ G/P`,
    /// until the iterate stops moving or `max_iters` is hit.
    pub fn recover(&self, g: f64, cfg: &HnConfig, start: Option<&DVector<f64>>) -> Result<Estimate> {
        cfg.validate()?;
        if !(g >= 0.0) {
            return Err(Error::Domain(format!("threshold {g} must be ≥ 0")));
        }
        let n = self.dim();
        let mut theta = match start {
            Some(s) if s.len() != n => return Err(Error::dimension("start vector", n, s.len())),
            Some(s) => s.clone(),
            None => DVector::zeros(n),
        };
        let cut = g / cfg.divisor;
        let step = 1.0 / cfg.lambda;
        let mut q_theta = DVector::zeros(n);
        let mut next = DVector::zeros(n);
        for iter in 1..=cfg.max_iters {
            q_theta.fill(0.0);
            for (k, &t) in theta.iter().enumerate() {
                if t != 0.0 {
                    q_theta.axpy(t, &self.gram.column(k), 1.0);
                }
            }
            let mut change = 0.0_f64;
            for k in 0..n {
                let chi = theta[k] + step * (self.correlation[k] - q_theta[k]);
                if !chi.is_finite() {
                    return Err(Error::Divergence { iteration: iter });
                }
                let kept = if chi.abs() >= cut { chi } else { 0.0 };
                change = change.max((kept - theta[k]).abs());
                next[k] = kept;
            }
            std::mem::swap(&mut theta, &mut next);
            if change < cfg.fixpoint_tol {
                return Estimate::new(theta, "hn", iter);
            }
        }
        Estimate::new(theta, "hn", cfg.max_iters)
    }
}

/// Thresholded gradient recovery from `θ⁽⁰⁾ = 0`.
pub fn hn_recover(a: &EffectiveMatrix, y: &DVector<f64>, g: f64, cfg: &HnConfig) -> Result<Estimate> {
    HnProblem::new(a, y)?.recover(g, cfg, None)
}

/// Same iteration started from `start`.
pub fn hn_recover_from(
    a: &EffectiveMatrix,
    y: &DVector<f64>,
    g: f64,
    cfg: &HnConfig,
    start: &DVector<f64>,
) -> Result<Estimate> {
    HnProblem::new(a, y)?.recover(g, cfg, Some(start))
}
