//! Adapters that run each configured estimator on a generated trial.

use chanest::estimators::{
    dantzig_selector, hn_recover, matching_pursuit, max_energy, pea_cs, sliding_correlator,
    threshold_set, Estimate, HnConfig, HnProblem,
};
use chanest::signal::snr_to_sigma;

use crate::config::{EstimatorKind, ExperimentConfig, InitialEstimate, MpOperand};
use crate::trial::{SweepContext, TrialData};

/// What an estimator produced on one trial.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// One estimate per variant, in variant order.
    pub candidates: Vec<Estimate>,
    /// 0-based index of an internal choice (the PEA-CS threshold), if any.
    pub choice: Option<usize>,
}

impl Outcome {
    pub fn single(estimate: Estimate) -> Self {
        Outcome {
            candidates: vec![estimate],
            choice: None,
        }
    }
}

/// A channel estimator driven by the sweep.
///
/// Estimators with several variants (such as one per threshold divisor)
/// report one candidate per variant; the sweep keeps the variant with the
/// lowest mean error at each SNR.
pub trait TrialEstimator: Send + Sync {
    fn id(&self) -> &str;

    fn variants(&self) -> usize {
        1
    }

    /// Text for the `extra` column when variant `index` wins.
    fn variant_label(&self, _index: usize) -> String {
        String::new()
    }

    fn estimate(&self, trial: &TrialData, ctx: &SweepContext) -> chanest::Result<Outcome>;
}

/// Built-in estimators selected by [`EstimatorKind`].
#[derive(Debug, Clone)]
pub struct Builtin {
    pub kind: EstimatorKind,
    cfg: ExperimentConfig,
}

impl Builtin {
    pub fn new(kind: EstimatorKind, cfg: &ExperimentConfig) -> Self {
        Builtin {
            kind,
            cfg: cfg.clone(),
        }
    }
}

pub fn builtin_estimators(cfg: &ExperimentConfig) -> Vec<Box<dyn TrialEstimator>> {
    cfg.estimators
        .iter()
        .map(|&kind| Box::new(Builtin::new(kind, cfg)) as Box<dyn TrialEstimator>)
        .collect()
}

/// The HN threshold at the trial's true noise level, before the divisor.
pub fn hn_threshold(trial: &TrialData, ctx: &SweepContext) -> f64 {
    ctx.model.eval(trial.sigma)
}

pub fn initial_estimate(cfg: &ExperimentConfig, trial: &TrialData) -> chanest::Result<Estimate> {
    match cfg.initial_estimate {
        InitialEstimate::Sliding => sliding_correlator(&trial.basis, &trial.received),
        InitialEstimate::MaxEnergy => max_energy(&trial.a, &trial.y),
    }
}

/// Runs the threshold bank over the noise range spanned by the configured
/// SNR endpoints for this trial's channel.
pub fn run_pea_cs(cfg: &ExperimentConfig, trial: &TrialData, ctx: &SweepContext) -> chanest::Result<Outcome> {
    let lo_snr = cfg.snr_db.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi_snr = cfg.snr_db.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sigma_low = snr_to_sigma(hi_snr, &trial.basis, &trial.h)?;
    let sigma_high = snr_to_sigma(lo_snr, &trial.basis, &trial.h)?;
    let init = initial_estimate(cfg, trial)?;
    let ts = threshold_set(&init, &ctx.model, (sigma_low, sigma_high), cfg.n_t)?;
    let hn = HnConfig::new(cfg.m, trial.sigma, trial.lambda);
    let (est, tr) = pea_cs(&trial.a, &trial.y, &ts, &hn)?;
    Ok(Outcome {
        candidates: vec![est],
        choice: Some(tr.chosen),
    })
}

impl TrialEstimator for Builtin {
    fn id(&self) -> &str {
        self.kind.id()
    }

    fn variants(&self) -> usize {
        match self.kind {
            EstimatorKind::HnOracleP => self.cfg.p_grid.len(),
            _ => 1,
        }
    }

    fn variant_label(&self, index: usize) -> String {
        match self.kind {
            EstimatorKind::HnOracleP => format!("p={}", crate::table::format_g12(self.cfg.p_grid[index])),
            EstimatorKind::HnFixedP => match self.cfg.fixed_divisor() {
                Some(p) => format!("p={}", crate::table::format_g12(p)),
                None => String::new(),
            },
            _ => String::new(),
        }
    }

    fn estimate(&self, trial: &TrialData, ctx: &SweepContext) -> chanest::Result<Outcome> {
        let cfg = &self.cfg;
        match self.kind {
            EstimatorKind::Sliding => sliding_correlator(&trial.basis, &trial.received).map(Outcome::single),
            EstimatorKind::MaxEnergy => max_energy(&trial.a, &trial.y).map(Outcome::single),
            EstimatorKind::HnOracleP => {
                let problem = HnProblem::new(&trial.a, &trial.y)?;
                let g = hn_threshold(trial, ctx);
                let candidates = cfg
                    .p_grid
                    .iter()
                    .map(|&p| {
                        let hn = HnConfig::new(cfg.m, trial.sigma, trial.lambda).with_divisor(p);
                        problem.recover(g, &hn, None)
                    })
                    .collect::<chanest::Result<Vec<_>>>()?;
                Ok(Outcome {
                    candidates,
                    choice: None,
                })
            }
            EstimatorKind::HnFixedP => {
                let p = cfg.fixed_divisor().ok_or_else(|| {
                    chanest::Error::Contract("hn_fixed_p needs a numeric divisor".into())
                })?;
                let hn = HnConfig::new(cfg.m, trial.sigma, trial.lambda).with_divisor(p);
                hn_recover(&trial.a, &trial.y, hn_threshold(trial, ctx), &hn).map(Outcome::single)
            }
            EstimatorKind::PeaCs => run_pea_cs(cfg, trial, ctx),
            EstimatorKind::Mp => {
                let est = match cfg.mp_operand {
                    MpOperand::Full => {
                        matching_pursuit(trial.basis.matrix(), trial.received.samples(), cfg.s)?
                    }
                    MpOperand::Compressed => matching_pursuit(trial.a.matrix(), &trial.y, cfg.s)?,
                };
                Ok(Outcome::single(est))
            }
            EstimatorKind::Ds => dantzig_selector(&trial.a, &trial.y, cfg.gamma).map(Outcome::single),
        }
    }
}
