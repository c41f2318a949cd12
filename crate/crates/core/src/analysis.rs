//! Error metrics, Cramér–Rao baselines and the training power constraint.

use rayon::prelude::*;

use crate::estimators::Estimate;
use crate::linops::{trace_inverse_gram, ColumnSelection, GramTrace};
use crate::signal::{build_convolution, gen_sparse_channel, gen_training, AmplitudeLaw, ConvolutionBasis, SparseChannel};
use crate::{Error, Result, RngStream};

/// Both Cramér–Rao bounds for one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct CrbReport {
    pub crb_u: f64,
    pub crb_s: f64,
    pub sigma: f64,
    pub support_used: Vec<usize>,
}

impl CrbReport {
    pub fn compute(basis: &ConvolutionBasis, sigma: f64, support: &[usize]) -> Result<Self> {
        Ok(CrbReport {
            crb_u: crb_unstructured(basis, sigma)?,
            crb_s: crb_structured(basis, sigma, support)?,
            sigma,
            support_used: support.to_vec(),
        })
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma >= 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("σ = {sigma} must be finite and ≥ 0")))
    }
}

/// `σ²·tr((CᵀC)⁻¹)`.
pub fn crb_unstructured(basis: &ConvolutionBasis, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let gram = GramTrace::compute(basis.matrix(), ColumnSelection::All)?;
    if !gram.is_full_rank() {
        return Err(Error::Singular(format!(
            "convolution gram has rank {} < {}",
            gram.rank, gram.dim
        )));
    }
    Ok(sigma * sigma * gram.trace)
}

/// `σ²·tr(pinv(C_Sᵀ C_S))` where `C_S` keeps the columns in `support`.
pub fn crb_structured(basis: &ConvolutionBasis, sigma: f64, support: &[usize]) -> Result<f64> {
    check_sigma(sigma)?;
    if support.is_empty() {
        return Err(Error::Domain("structured bound needs a non-empty support".into()));
    }
    let trace = trace_inverse_gram(basis.matrix(), ColumnSelection::Subset(support))?;
    Ok(sigma * sigma * trace)
}

/// Squared Euclidean error `‖ĥ − h‖²`.
pub fn mse(estimate: &Estimate, h: &SparseChannel) -> Result<f64> {
    if estimate.len() != h.delay_spread() {
        return Err(Error::dimension(
            "mse",
            h.delay_spread().to_string(),
            estimate.len().to_string(),
        ));
    }
    Ok((&estimate.h_hat - h.taps()).norm_squared())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCheckReport {
    /// `‖C·h‖²`; for Monte Carlo reports, the mean over trials.
    pub norm_sq: f64,
    pub bound: f64,
    /// For Monte Carlo reports, whether every trial passed.
    pub satisfied: bool,
    pub trials: usize,
    pub rate: f64,
}

/// Checks `‖C·h‖² ≤ (M+N−1)/M` on a normalized basis.
pub fn power_check(basis: &ConvolutionBasis, h: &SparseChannel) -> Result<PowerCheckReport> {
    if !basis.is_normalized() {
        return Err(Error::Contract("power check expects a normalized basis".into()));
    }
    let x = basis.apply(h)?;
    let norm_sq = x.norm_squared();
    let bound = basis.signal_len() as f64 / basis.training_len() as f64;
    let satisfied = norm_sq <= bound;
    Ok(PowerCheckReport {
        norm_sq,
        bound,
        satisfied,
        trials: 1,
        rate: if satisfied { 1.0 } else { 0.0 },
    })
}

/// Fraction of fresh `(c, h)` draws satisfying the power constraint.
///
/// Trial `t` draws its training sequence from `rng.fork(t).fork(0)` and its
/// channel from `rng.fork(t).fork(1)`. `s = 0` uses the all-zero channel.
pub fn power_montecarlo(
    m: usize,
    n: usize,
    s: usize,
    trials: usize,
    law: AmplitudeLaw,
    rng: &RngStream,
) -> Result<PowerCheckReport> {
    if trials == 0 {
        return Err(Error::Domain("power Monte Carlo needs at least one trial".into()));
    }
    if s > n {
        return Err(Error::Domain(format!("sparsity {s} exceeds delay spread {n}")));
    }
    let reports = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial = rng.fork(t as u64);
            let c = gen_training(m, &mut trial.fork(0))?;
            let basis = build_convolution(&c, n, true)?;
            let h = if s == 0 {
                SparseChannel::zero(n)?
            } else {
                gen_sparse_channel(n, s, law, &mut trial.fork(1))?
            };
            power_check(&basis, &h)
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = reports.iter().filter(|r| r.satisfied).count();
    let mean_norm = reports.iter().map(|r| r.norm_sq).sum::<f64>() / trials as f64;
    Ok(PowerCheckReport {
        norm_sq: mean_norm,
        bound: reports[0].bound,
        satisfied: passed == trials,
        trials,
        rate: passed as f64 / trials as f64,
    })
}

/// Per-sample tail bound `exp(−1/(2S))` and the aggregate
/// `1 − exp(−1/(2S))^(M+N−1)`.
pub fn hoeffding_bound(s: usize, m: usize, n: usize) -> Result<(f64, f64)> {
    if s == 0 {
        return Err(Error::Domain("sparsity must be ≥ 1".into()));
    }
    if m == 0 || n == 0 {
        return Err(Error::Domain("training length and delay spread must be ≥ 1".into()));
    }
    let per_sample = (-1.0 / (2.0 * s as f64)).exp();
    let aggregate = 1.0 - per_sample.powi((m + n - 1) as i32);
    Ok((per_sample, aggregate))
}
