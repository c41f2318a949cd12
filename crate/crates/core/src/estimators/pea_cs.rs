use nalgebra::DVector;
use rayon::prelude::*;

use super::{Estimate, HnConfig, HnProblem, ThresholdSet};
use crate::measurement::EffectiveMatrix;
use crate::{Error, Result};

/// Record of one parallel-estimation run.
#[derive(Debug, Clone, PartialEq)]
pub struct PeaCsTrace {
    pub thresholds: Vec<f64>,
    /// `e(i) = |Σ_k (y − A·ĥ_i)_k|`.
    pub errors: Vec<f64>,
    /// Forward differences `e(i) − e(i−1)`; entry `j` belongs to threshold
    /// `j + 1`, the first threshold has none.
    pub derivative: Vec<f64>,
    /// Zero-based index of the selected threshold.
    pub chosen: usize,
    /// Set when every difference was zero and the smallest threshold was
    /// taken instead.
    pub fallback: bool,
    pub estimates: Vec<Estimate>,
}

/// Picks the index whose forward difference has the smallest non-zero
/// magnitude; ties go to the smaller index.
///
/// Returns `None` when all differences are exactly zero.
pub fn select_index(errors: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for j in 1..errors.len() {
        let d = (errors[j] - errors[j - 1]).abs();
        if d == 0.0 {
            continue;
        }
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((j, d));
        }
    }
    best.map(|(j, _)| j)
}

/// Runs one thresholded recovery per threshold and keeps the estimate at
/// the selected index.
///
/// Each recovery uses `cfg` with the threshold taken from the set in place
/// of `G`, so `cfg.divisor` should normally be 1.
pub fn pea_cs(
    a: &EffectiveMatrix,
    y: &DVector<f64>,
    ts: &ThresholdSet,
    cfg: &HnConfig,
) -> Result<(Estimate, PeaCsTrace)> {
    if ts.is_empty() {
        return Err(Error::Domain("threshold set is empty".into()));
    }
    let problem = HnProblem::new(a, y)?;
    let estimates = ts
        .thresholds
        .par_iter()
        .map(|&t| problem.recover(t, cfg, None))
        .collect::<Result<Vec<_>>>()?;

    let mut errors = Vec::with_capacity(estimates.len());
    for est in &estimates {
        let fitted = a.matrix().mul_vec(&est.h_hat)?;
        errors.push((y - fitted).sum().abs());
    }
    let derivative = errors.windows(2).map(|w| w[1] - w[0]).collect();

    let (chosen, fallback) = match select_index(&errors) {
        Some(j) => (j, false),
        None => {
            let smallest = ts
                .thresholds
                .iter()
                .enumerate()
                .min_by(|x, y| x.1.total_cmp(y.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            (smallest, true)
        }
    };
    let mut picked = estimates[chosen].clone();
    picked.estimator = "pea_cs".into();
    Ok((
        picked,
        PeaCsTrace {
            thresholds: ts.thresholds.clone(),
            errors,
            derivative,
            chosen,
            fallback,
            estimates,
        },
    ))
}
