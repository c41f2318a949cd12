//! Monte Carlo sweeps over SNR.

use std::collections::BTreeMap;

use chanest::analysis::{crb_structured, crb_unstructured, mse};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{validate_p_grid, ConfigError, EstimatorKind, ExperimentConfig};
use crate::estimators::{builtin_estimators, Builtin, TrialEstimator};
use crate::table::{format_g12, to_db, ResultRow, ResultTable};
use crate::trial::{generate_trial, SweepContext, TrialData};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("sweep setup: {0}")]
    Setup(#[source] chanest::Error),
    #[error("trial {trial} at {snr_db} dB: {source}")]
    Trial {
        snr_db: f64,
        trial: usize,
        #[source]
        source: chanest::Error,
    },
}

/// Per-estimator aggregate at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSummary {
    pub id: String,
    /// Mean error of each variant over successful trials.
    pub variant_means: Vec<f64>,
    /// Index of the variant with the smallest mean.
    pub best_variant: usize,
    pub successes: usize,
    pub failures: usize,
    /// 0-based internal choice → number of trials.
    pub choices: BTreeMap<usize, usize>,
    pub extra: String,
}

impl EstimatorSummary {
    pub fn mean_mse(&self) -> f64 {
        self.variant_means[self.best_variant]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrSummary {
    pub snr_db: f64,
    pub trials: usize,
    pub crb_u: f64,
    pub crb_s: f64,
    pub estimators: Vec<EstimatorSummary>,
}

/// Raw per-trial results, kept for inspection by callers that need more
/// than the means.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub snr_index: usize,
    pub trial_index: usize,
    pub crb_u: f64,
    pub crb_s: f64,
    /// Per estimator: per-variant errors and the internal choice, or the
    /// error message of a failed run.
    pub results: Vec<Result<(Vec<f64>, Option<usize>), String>>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub summaries: Vec<SnrSummary>,
    pub records: Vec<TrialRecord>,
}

impl SweepOutput {
    pub fn table(&self) -> ResultTable {
        let mut rows = Vec::new();
        for snr in &self.summaries {
            for est in &snr.estimators {
                rows.push(ResultRow {
                    snr_db: snr.snr_db,
                    estimator: est.id.clone(),
                    mean_mse: est.mean_mse(),
                    mean_mse_db: to_db(est.mean_mse()),
                    crb_u: snr.crb_u,
                    crb_s: snr.crb_s,
                    trials: snr.trials,
                    failures: est.failures,
                    extra: est.extra.clone(),
                });
            }
        }
        ResultTable { rows }
    }
}

/// Runs the configured built-in estimators.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ResultTable, SweepError> {
    cfg.validate()?;
    let ctx = SweepContext::new(cfg).map_err(SweepError::Setup)?;
    Ok(run_sweep_with(cfg, &ctx, &builtin_estimators(cfg))?.table())
}

fn run_trial(
    ctx: &SweepContext,
    estimators: &[Box<dyn TrialEstimator>],
    trial: &TrialData,
) -> chanest::Result<TrialRecord> {
    let crb_u = crb_unstructured(&trial.basis, trial.sigma)?;
    let crb_s = crb_structured(&trial.basis, trial.sigma, trial.h.support())?;
    let results = estimators
        .iter()
        .map(|e| {
            let outcome = e.estimate(trial, ctx).map_err(|err| err.to_string())?;
            if outcome.candidates.len() != e.variants() {
                return Err(format!(
                    "{} returned {} candidates for {} variants",
                    e.id(),
                    outcome.candidates.len(),
                    e.variants()
                ));
            }
            let errors = outcome
                .candidates
                .iter()
                .map(|c| mse(c, &trial.h))
                .collect::<chanest::Result<Vec<f64>>>()
                .map_err(|err| err.to_string())?;
            Ok((errors, outcome.choice))
        })
        .collect();
    Ok(TrialRecord {
        snr_index: trial.snr_index,
        trial_index: trial.trial_index,
        crb_u,
        crb_s,
        results,
    })
}

/// Runs arbitrary estimators over the configured SNRs and trials.
///
/// Trials run in parallel; aggregation walks them in `(snr, trial)` order,
/// so the output does not depend on the thread count. An estimator error
/// counts as a failure for that trial and is left out of the mean. Errors
/// while generating data or bounds abort the sweep.
pub fn run_sweep_with(
    cfg: &ExperimentConfig,
    ctx: &SweepContext,
    estimators: &[Box<dyn TrialEstimator>],
) -> Result<SweepOutput, SweepError> {
    cfg.validate()?;
    let units: Vec<(usize, usize)> = (0..cfg.snr_db.len())
        .flat_map(|s| (0..cfg.trials).map(move |t| (s, t)))
        .collect();
    let records = units
        .par_iter()
        .map(|&(s, t)| {
            let wrap = |source| SweepError::Trial {
                snr_db: cfg.snr_db[s],
                trial: t,
                source,
            };
            let trial = generate_trial(cfg, s, t).map_err(wrap)?;
            run_trial(ctx, estimators, &trial).map_err(wrap)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let summaries = cfg
        .snr_db
        .iter()
        .enumerate()
        .map(|(s, &snr_db)| {
            let at: Vec<&TrialRecord> = records[s * cfg.trials..(s + 1) * cfg.trials].iter().collect();
            summarize(snr_db, &at, estimators)
        })
        .collect();
    Ok(SweepOutput { summaries, records })
}

fn summarize(snr_db: f64, records: &[&TrialRecord], estimators: &[Box<dyn TrialEstimator>]) -> SnrSummary {
    let count = records.len() as f64;
    let crb_u = records.iter().map(|r| r.crb_u).sum::<f64>() / count;
    let crb_s = records.iter().map(|r| r.crb_s).sum::<f64>() / count;
    let estimators = estimators
        .iter()
        .enumerate()
        .map(|(e, est)| {
            let mut sums = vec![0.0; est.variants()];
            let mut successes = 0;
            let mut failures = 0;
            let mut choices = BTreeMap::new();
            for r in records {
                match &r.results[e] {
                    Ok((errors, choice)) => {
                        successes += 1;
                        for (acc, v) in sums.iter_mut().zip(errors) {
                            *acc += v;
                        }
                        if let Some(c) = choice {
                            *choices.entry(*c).or_insert(0) += 1;
                        }
                    }
                    Err(_) => failures += 1,
                }
            }
            let variant_means: Vec<f64> = sums
                .iter()
                .map(|s| if successes > 0 { s / successes as f64 } else { f64::NAN })
                .collect();
            let mut best_variant = 0;
            for (i, m) in variant_means.iter().enumerate() {
                if *m < variant_means[best_variant] {
                    best_variant = i;
                }
            }
            let extra = if !choices.is_empty() {
                choices
                    .iter()
                    .map(|(i, c)| format!("{}:{c}", i + 1))
                    .collect::<Vec<_>>()
                    .join(";")
            } else {
                est.variant_label(best_variant)
            };
            EstimatorSummary {
                id: est.id().to_string(),
                variant_means,
                best_variant,
                successes,
                failures,
                choices,
                extra,
            }
        })
        .collect();
    SnrSummary {
        snr_db,
        trials: records.len(),
        crb_u,
        crb_s,
        estimators,
    }
}

/// Mean HN error for every divisor in the grid, and the best one, at each SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct OraclePResult {
    pub p_grid: Vec<f64>,
    pub summaries: Vec<SnrSummary>,
}

impl OraclePResult {
    /// Best divisor per SNR, in SNR order.
    pub fn best_p(&self) -> Vec<(f64, f64)> {
        self.summaries
            .iter()
            .map(|s| (s.snr_db, self.p_grid[s.estimators[0].best_variant]))
            .collect()
    }

    /// One `hn_p=<P>` row per grid point, then an `hn_oracle_p` row whose
    /// `extra` names the winner.
    pub fn table(&self) -> ResultTable {
        let mut rows = Vec::new();
        for s in &self.summaries {
            let est = &s.estimators[0];
            for (p, mean) in self.p_grid.iter().zip(&est.variant_means) {
                rows.push(ResultRow {
                    snr_db: s.snr_db,
                    estimator: format!("hn_p={}", format_g12(*p)),
                    mean_mse: *mean,
                    mean_mse_db: to_db(*mean),
                    crb_u: s.crb_u,
                    crb_s: s.crb_s,
                    trials: s.trials,
                    failures: est.failures,
                    extra: String::new(),
                });
            }
            rows.push(ResultRow {
                snr_db: s.snr_db,
                estimator: EstimatorKind::HnOracleP.id().into(),
                mean_mse: est.mean_mse(),
                mean_mse_db: to_db(est.mean_mse()),
                crb_u: s.crb_u,
                crb_s: s.crb_s,
                trials: s.trials,
                failures: est.failures,
                extra: est.extra.clone(),
            });
        }
        ResultTable { rows }
    }
}

pub fn oracle_p_search(cfg: &ExperimentConfig, p_grid: &[f64]) -> Result<OraclePResult, SweepError> {
    validate_p_grid(p_grid)?;
    let cfg = ExperimentConfig {
        p_grid: p_grid.to_vec(),
        estimators: vec![EstimatorKind::HnOracleP],
        ..cfg.clone()
    };
    cfg.validate()?;
    let ctx = SweepContext::new(&cfg).map_err(SweepError::Setup)?;
    let estimators: Vec<Box<dyn TrialEstimator>> =
        vec![Box::new(Builtin::new(EstimatorKind::HnOracleP, &cfg))];
    let out = run_sweep_with(&cfg, &ctx, &estimators)?;
    Ok(OraclePResult {
        p_grid: p_grid.to_vec(),
        summaries: out.summaries,
    })
}
