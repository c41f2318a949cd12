//! Random projection of the received block, the effective sensing matrix,
//! the measurement-rank rule and the empirical `λ(N)` fit.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::linops::{linear_fit, rademacher_matrix, spectral_top, Matrix, RngStream};
use crate::signal::{ConvolutionBasis, ReceivedSignal};
use crate::{Error, Result};

/// `K × (M+N−1)` Rademacher projection with entries `±1/√K`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    matrix: Matrix,
}

impl MeasurementMatrix {
    /// Wraps an existing matrix after checking every entry is `±1/√K`.
    pub fn new(matrix: Matrix) -> Result<Self> {
        let k = matrix.nrows();
        if k > matrix.ncols() {
            return Err(Error::Domain(format!(
                "measurement rank {k} exceeds signal length {}",
                matrix.ncols()
            )));
        }
        let level = 1.0 / (k as f64).sqrt();
        if let Some(bad) = matrix.iter().find(|v| (v.abs() - level).abs() > 1e-12) {
            return Err(Error::Domain(format!(
                "measurement entry {bad} is not ±1/√{k}"
            )));
        }
        Ok(MeasurementMatrix { matrix })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn signal_len(&self) -> usize {
        self.matrix.ncols()
    }
}

pub fn gen_measurement(
    k: usize,
    signal_len: usize,
    rng: &mut RngStream,
) -> Result<MeasurementMatrix> {
    if k == 0 || k > signal_len {
        return Err(Error::Domain(format!(
            "measurement rank {k} must be in 1..={signal_len}"
        )));
    }
    Ok(MeasurementMatrix {
        matrix: rademacher_matrix(k, signal_len, rng, true)?,
    })
}

/// `y = Φ·r`.
pub fn project(phi: &MeasurementMatrix, r: &ReceivedSignal) -> Result<DVector<f64>> {
    phi.matrix.mul_vec(r.samples())
}

/// Sensing operator seen by the recovery algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveMatrix {
    matrix: Matrix,
}

impl EffectiveMatrix {
    /// Uses an arbitrary matrix as the sensing operator.
    pub fn from_matrix(matrix: Matrix) -> Self {
        EffectiveMatrix { matrix }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// `A = Φ · C/√M`. The basis must already be normalized.
pub fn effective(phi: &MeasurementMatrix, basis: &ConvolutionBasis) -> Result<EffectiveMatrix> {
    if !basis.is_normalized() {
        return Err(Error::Contract(
            "effective matrix requires a normalized convolution basis".into(),
        ));
    }
    Ok(EffectiveMatrix {
        matrix: phi.matrix.matmul(basis.matrix())?,
    })
}

/// Smallest `K` with `K ≥ S·log_base(N)`.
pub fn min_rank_with_base(s: usize, n: usize, base: f64) -> usize {
    let bound = s as f64 * (n as f64).ln() / base.ln();
    // Guard against 13.000000000000002-style round-up.
    let snapped = bound.round();
    if (bound - snapped).abs() < 1e-9 {
        snapped as usize
    } else {
        bound.ceil() as usize
    }
}

/// Smallest `K` with `K ≥ S·ln(N)`.
pub fn min_rank(s: usize, n: usize) -> usize {
    min_rank_with_base(s, n, std::f64::consts::E)
}

/// How the measurement rank follows the delay spread in [`lambda_fit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KRule {
    /// `K = ⌊N/2⌋`.
    HalfN,
    Fixed(usize),
}

impl KRule {
    pub fn rank_for(&self, n: usize) -> usize {
        match *self {
            KRule::HalfN => (n / 2).max(1),
            KRule::Fixed(k) => k,
        }
    }
}

/// Mean top eigenvalue at one delay spread.
#[derive(Debug, Clone, PartialEq)]
pub struct EigPoint {
    pub n: usize,
    pub k: usize,
    pub mean_lambda: f64,
    /// Standard error of the mean; zero with a single trial.
    pub std_err: f64,
}

/// Linear model `λ(N) = intercept + slope·N` fitted at training length `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigFit {
    pub intercept: f64,
    pub slope: f64,
    pub n_low: usize,
    pub n_high: usize,
    pub m: usize,
    pub residual_norm: f64,
    pub points: Vec<EigPoint>,
}

impl EigFit {
    /// Fits the line through precomputed points.
    pub fn from_points(m: usize, points: Vec<EigPoint>) -> Result<Self> {
        let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.mean_lambda).collect();
        let line = linear_fit(&xs, &ys)?;
        let n_low = points.iter().map(|p| p.n).min().unwrap_or(0);
        let n_high = points.iter().map(|p| p.n).max().unwrap_or(0);
        Ok(EigFit {
            intercept: line.intercept,
            slope: line.slope,
            n_low,
            n_high,
            m,
            residual_norm: line.residual_norm,
            points,
        })
    }

    /// Fit with explicit constants and no sample points.
    pub fn from_constants(m: usize, intercept: f64, slope: f64, n_low: usize, n_high: usize) -> Self {
        EigFit {
            intercept,
            slope,
            n_low,
            n_high,
            m,
            residual_norm: 0.0,
            points: Vec::new(),
        }
    }

    pub fn lambda_at(&self, n: usize) -> f64 {
        self.intercept + self.slope * n as f64
    }
}

/// Top eigenvalue expected from the Marchenko–Pastur edge for a `K × L`
/// matrix with entries `±1/√K`: `(√(L/K) + 1)²`.
pub fn mp_edge(k: usize, l: usize) -> f64 {
    ((l as f64 / k as f64).sqrt() + 1.0).powi(2)
}

/// Averages `spectral_top` over `trials_per_n` normalized Rademacher
/// matrices of shape `K × (M+N−1)` for each `N`, then fits a line.
///
/// Trial `t` at the `i`-th delay spread draws from `rng.fork(i).fork(t)`,
/// so results do not depend on scheduling.
pub fn lambda_fit(
    m: usize,
    n_values: &[usize],
    k_rule: KRule,
    trials_per_n: usize,
    rng: &RngStream,
) -> Result<EigFit> {
    if trials_per_n == 0 {
        return Err(Error::Domain("need at least one trial per delay spread".into()));
    }
    if m == 0 {
        return Err(Error::Domain("training length must be at least 1".into()));
    }
    if let Some(&bad) = n_values.iter().find(|&&n| n < 2) {
        return Err(Error::Domain(format!("delay spread {bad} below 2")));
    }
    let points = n_values
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let k = k_rule.rank_for(n);
            let l = m + n - 1;
            let base = rng.fork(i as u64);
            let lambdas = (0..trials_per_n)
                .into_par_iter()
                .map(|t| {
                    let mut stream = base.fork(t as u64);
                    let phi = gen_measurement(k, l, &mut stream)?;
                    spectral_top(phi.matrix())
                })
                .collect::<Result<Vec<f64>>>()?;
            let count = lambdas.len() as f64;
            let mean = lambdas.iter().sum::<f64>() / count;
            let std_err = if lambdas.len() > 1 {
                let var = lambdas.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
                (var / count).sqrt()
            } else {
                0.0
            };
            Ok(EigPoint {
                n,
                k,
                mean_lambda: mean,
                std_err,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    EigFit::from_points(m, points)
}
