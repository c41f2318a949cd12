//! Per-trial data generation and the quantities shared by a whole sweep.

use chanest::estimators::{calibrate_threshold_model_with_base, ThresholdModel};
use chanest::linops::spectral_top;
use chanest::measurement::{
    effective, gen_measurement, lambda_fit, project, EffectiveMatrix, EigFit, KRule, MeasurementMatrix,
};
use chanest::signal::{
    build_convolution, gen_sparse_channel, gen_training, snr_to_sigma, transmit, ConvolutionBasis,
    ReceivedSignal, SparseChannel,
};
use chanest::RngStream;
use nalgebra::DVector;

use crate::config::ExperimentConfig;

/// Sub-stream tags under each `(snr, trial)` stream.
pub const TAG_TRAINING: u64 = 0;
pub const TAG_CHANNEL: u64 = 1;
pub const TAG_MEASUREMENT: u64 = 2;
pub const TAG_NOISE: u64 = 3;
/// Tag of the eigenvalue-fit stream under the root seed. Kept far from the
/// SNR indices so the two never collide.
pub const TAG_EIG_FIT: u64 = u64::MAX;

/// Everything one trial's estimators see.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub snr_index: usize,
    pub trial_index: usize,
    pub snr_db: f64,
    pub sigma: f64,
    /// Normalized convolution basis.
    pub basis: ConvolutionBasis,
    pub h: SparseChannel,
    pub phi: MeasurementMatrix,
    pub received: ReceivedSignal,
    pub a: EffectiveMatrix,
    pub y: DVector<f64>,
    /// Top eigenvalue of `AᵀA`, the HN step bound.
    pub lambda: f64,
}

/// Stream for trial `trial` at SNR index `snr`: `root.fork(snr).fork(trial)`.
pub fn trial_stream(seed: u64, snr_index: usize, trial_index: usize) -> RngStream {
    RngStream::new(seed).fork(snr_index as u64).fork(trial_index as u64)
}

pub fn generate_trial(
    cfg: &ExperimentConfig,
    snr_index: usize,
    trial_index: usize,
) -> chanest::Result<TrialData> {
    let stream = trial_stream(cfg.seed, snr_index, trial_index);
    let snr_db = cfg.snr_db[snr_index];
    let c = gen_training(cfg.m, &mut stream.fork(TAG_TRAINING))?;
    let basis = build_convolution(&c, cfg.n, true)?;
    let h = gen_sparse_channel(cfg.n, cfg.s, cfg.amplitude_law, &mut stream.fork(TAG_CHANNEL))?;
    let phi = gen_measurement(cfg.k, basis.signal_len(), &mut stream.fork(TAG_MEASUREMENT))?;
    let sigma = snr_to_sigma(snr_db, &basis, &h)?;
    let received = transmit(&basis, &h, sigma, &mut stream.fork(TAG_NOISE))?;
    let a = effective(&phi, &basis)?;
    let y = project(&phi, &received)?;
    let lambda = spectral_top(a.matrix())?;
    Ok(TrialData {
        snr_index,
        trial_index,
        snr_db,
        sigma,
        basis,
        h,
        phi,
        received,
        a,
        y,
        lambda,
    })
}

/// Quantities computed once per sweep.
#[derive(Debug, Clone)]
pub struct SweepContext {
    pub fit: EigFit,
    pub model: ThresholdModel,
}

/// Delay spreads `N/2, N/2 + N/10, …, 3N/2` used for the eigenvalue fit.
pub fn fit_delay_spreads(n: usize) -> Vec<usize> {
    let lo = (n / 2).max(2);
    let hi = (3 * n / 2).max(lo + 1);
    let step = (n / 10).max(1);
    let mut values: Vec<usize> = (lo..=hi).step_by(step).collect();
    if values.len() < 2 {
        values.push(hi);
    }
    values
}

impl SweepContext {
    pub fn new(cfg: &ExperimentConfig) -> chanest::Result<Self> {
        // The fit follows the configured rank: K = N/2 tracks the delay
        // spread, any other K stays fixed across the fit range.
        let rule = if cfg.k == cfg.n / 2 {
            KRule::HalfN
        } else {
            KRule::Fixed(cfg.k)
        };
        let rng = RngStream::new(cfg.seed).fork(TAG_EIG_FIT);
        let fit = lambda_fit(cfg.m, &fit_delay_spreads(cfg.n), rule, cfg.eig_trials, &rng)?;
        let model = calibrate_threshold_model_with_base(cfg.m, cfg.n, &fit, cfg.log_base)?;
        Ok(SweepContext { fit, model })
    }

    pub fn with_model(fit: EigFit, model: ThresholdModel) -> Self {
        SweepContext { fit, model }
    }
}
