//! Channel estimators.

mod dantzig;
mod hn;
mod initial;
mod mp;
mod pea_cs;
mod threshold;

use nalgebra::DVector;

use crate::{Error, Result};

pub use dantzig::{dantzig_selector, dantzig_selector_with_report, DantzigReport, DS_KKT_TOL, DS_MAX_ITERS};
pub use hn::{hn_recover, hn_recover_from, HnConfig, HnProblem};
pub use initial::{max_energy, sliding_correlator};
pub use mp::matching_pursuit;
pub use pea_cs::{pea_cs, select_index, PeaCsTrace};
pub use threshold::{
    calibrate_threshold_model, calibrate_threshold_model_with_base, hn_threshold_raw, threshold_set, ThresholdModel, ThresholdSet,
};

/// A channel estimate and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub h_hat: DVector<f64>,
    pub estimator: String,
    /// Zero for non-iterative estimators.
    pub iterations_used: usize,
}

impl Estimate {
    pub fn new(h_hat: DVector<f64>, estimator: impl Into<String>, iterations_used: usize) -> Result<Self> {
        if let Some(bad) = h_hat.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite estimate entry {bad}")));
        }
        Ok(Estimate {
            h_hat,
            estimator: estimator.into(),
            iterations_used,
        })
    }

    pub fn len(&self) -> usize {
        self.h_hat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_hat.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.h_hat.amax()
    }
}
