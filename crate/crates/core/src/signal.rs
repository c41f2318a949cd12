//! Sparse channels, ±1 training blocks, the Toeplitz convolution basis, and
//! noisy reception.

use nalgebra::{DMatrix, DVector};

use crate::linops::{Matrix, RngStream};
use crate::{Error, Result};

/// Distribution of the non-zero tap amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeLaw {
    /// Uniform magnitude on `[floor, 1]` with a random sign.
    Uniform { floor: f64 },
    /// Zero-mean Gaussian with the given standard deviation, clipped to
    /// `[−1, 1]`.
    GaussianClipped { std_dev: f64 },
}

impl AmplitudeLaw {
    pub const DEFAULT_FLOOR: f64 = 0.1;

    /// Standard deviation of a uniform law on `[−1, 1]`.
    pub const MATCHED_GAUSSIAN_STD: f64 = 0.577_350_269_189_625_8;

    pub fn uniform() -> Self {
        AmplitudeLaw::Uniform {
            floor: Self::DEFAULT_FLOOR,
        }
    }

    pub fn gaussian_clipped() -> Self {
        AmplitudeLaw::GaussianClipped {
            std_dev: Self::MATCHED_GAUSSIAN_STD,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            AmplitudeLaw::Uniform { floor } if !(0.0..1.0).contains(&floor) => Err(
                Error::Domain(format!("uniform amplitude floor {floor} outside [0, 1)")),
            ),
            AmplitudeLaw::GaussianClipped { std_dev } if !(std_dev > 0.0) => Err(Error::Domain(
                format!("gaussian amplitude std {std_dev} must be positive"),
            )),
            _ => Ok(()),
        }
    }

    fn draw(&self, rng: &mut RngStream) -> f64 {
        loop {
            let a = match *self {
                AmplitudeLaw::Uniform { floor } => rng.sign() * rng.uniform(floor, 1.0),
                AmplitudeLaw::GaussianClipped { std_dev } => {
                    (std_dev * rng.gaussian()).clamp(-1.0, 1.0)
                }
            };
            if a != 0.0 {
                return a;
            }
        }
    }
}

impl Default for AmplitudeLaw {
    fn default() -> Self {
        Self::uniform()
    }
}

/// Channel impulse response with `delay_spread` taps, most of them zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseChannel {
    taps: DVector<f64>,
    support: Vec<usize>,
}

impl SparseChannel {
    /// Wraps a dense tap vector. Amplitudes must lie in `[−1, 1]`.
    pub fn from_taps(taps: DVector<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::Domain("channel needs at least one tap".into()));
        }
        if let Some(bad) = taps.iter().find(|t| !(t.abs() <= 1.0)) {
            return Err(Error::Domain(format!("tap amplitude {bad} outside [-1, 1]")));
        }
        let support = taps
            .iter()
            .enumerate()
            .filter(|(_, &t)| t != 0.0)
            .map(|(i, _)| i)
            .collect();
        Ok(SparseChannel { taps, support })
    }

    pub fn zero(delay_spread: usize) -> Result<Self> {
        Self::from_taps(DVector::zeros(delay_spread))
    }

    pub fn delay_spread(&self) -> usize {
        self.taps.len()
    }

    /// Indices of the non-zero taps, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn taps(&self) -> &DVector<f64> {
        &self.taps
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.support.iter().map(|&i| self.taps[i]).collect()
    }
}

/// Draws a channel with exactly `s` non-zero taps among `n`.
pub fn gen_sparse_channel(
    n: usize,
    s: usize,
    law: AmplitudeLaw,
    rng: &mut RngStream,
) -> Result<SparseChannel> {
    if s == 0 || s > n {
        return Err(Error::Domain(format!(
            "sparsity {s} must be in 1..={n} (delay spread)"
        )));
    }
    law.validate()?;
    let support = rng.sample_indices(n, s);
    let mut taps = DVector::zeros(n);
    for &i in &support {
        taps[i] = law.draw(rng);
    }
    SparseChannel::from_taps(taps)
}

/// Known block of ±1 symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSequence(Vec<f64>);

impl TrainingSequence {
    pub fn new(symbols: Vec<f64>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Domain("training sequence must be non-empty".into()));
        }
        if let Some(bad) = symbols.iter().find(|&&s| s != 1.0 && s != -1.0) {
            return Err(Error::Domain(format!("training symbol {bad} is not ±1")));
        }
        Ok(TrainingSequence(symbols))
    }

    pub fn symbols(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn gen_training(m: usize, rng: &mut RngStream) -> Result<TrainingSequence> {
    if m == 0 {
        return Err(Error::Domain("training length must be at least 1".into()));
    }
    TrainingSequence::new((0..m).map(|_| rng.sign()).collect())
}

/// Full Toeplitz convolution matrix of shape `(M+N−1) × N`.
///
/// Column `j` holds the training block shifted down by `j` rows, so
/// `C·h` is the full linear convolution of the training block with `h`.
/// When normalized, the matrix is divided by `√M` and every column has unit
/// norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionBasis {
    matrix: Matrix,
    normalized: bool,
    training: TrainingSequence,
}

impl ConvolutionBasis {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn training(&self) -> &TrainingSequence {
        &self.training
    }

    pub fn delay_spread(&self) -> usize {
        self.matrix.ncols()
    }

    /// `M + N − 1`.
    pub fn signal_len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn training_len(&self) -> usize {
        self.training.len()
    }

    /// Noiseless received block `C·h`.
    pub fn apply(&self, h: &SparseChannel) -> Result<DVector<f64>> {
        if h.delay_spread() != self.delay_spread() {
            return Err(Error::dimension(
                "channel delay spread",
                self.delay_spread(),
                h.delay_spread(),
            ));
        }
        self.matrix.mul_vec(h.taps())
    }
}

pub fn build_convolution(
    c: &TrainingSequence,
    n: usize,
    normalize: bool,
) -> Result<ConvolutionBasis> {
    if n == 0 {
        return Err(Error::Domain("delay spread must be at least 1".into()));
    }
    let m = c.len();
    let scale = if normalize { 1.0 / (m as f64).sqrt() } else { 1.0 };
    let symbols = c.symbols();
    let matrix = DMatrix::from_fn(m + n - 1, n, |i, j| {
        if i >= j && i - j < m {
            symbols[i - j] * scale
        } else {
            0.0
        }
    });
    Ok(ConvolutionBasis {
        matrix: Matrix::new(matrix)?,
        normalized: normalize,
        training: c.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSignal {
    samples: DVector<f64>,
    noise_sigma: f64,
}

impl ReceivedSignal {
    pub fn new(samples: DVector<f64>, noise_sigma: f64) -> Result<Self> {
        if !(noise_sigma >= 0.0) {
            return Err(Error::Domain(format!("noise sigma {noise_sigma} is negative")));
        }
        Ok(ReceivedSignal {
            samples,
            noise_sigma,
        })
    }

    pub fn samples(&self) -> &DVector<f64> {
        &self.samples
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `r = C·h + n` with i.i.d. `N(0, σ²)` noise.
///
/// No noise samples are drawn when `σ = 0`.
pub fn transmit(
    basis: &ConvolutionBasis,
    h: &SparseChannel,
    sigma: f64,
    rng: &mut RngStream,
) -> Result<ReceivedSignal> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("noise sigma {sigma} must be finite and ≥ 0")));
    }
    let mut samples = basis.apply(h)?;
    if sigma > 0.0 {
        for s in samples.iter_mut() {
            *s += sigma * rng.gaussian();
        }
    }
    ReceivedSignal::new(samples, sigma)
}

/// Noise standard deviation giving the requested SNR.
///
/// SNR is the average per-sample signal power `‖C·h‖² / (M+N−1)` over `σ²`,
/// so `σ = √(P_x / 10^(snr_db/10))`.
pub fn snr_to_sigma(snr_db: f64, basis: &ConvolutionBasis, h: &SparseChannel) -> Result<f64> {
    if snr_db.is_nan() {
        return Err(Error::Domain("SNR is NaN".into()));
    }
    let x = basis.apply(h)?;
    let power = x.norm_squared() / basis.signal_len() as f64;
    if power == 0.0 {
        return Err(Error::Domain("zero channel has no signal power".into()));
    }
    Ok((power / 10f64.powf(snr_db / 10.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn training(symbols: &[f64]) -> TrainingSequence {
        TrainingSequence::new(symbols.to_vec()).unwrap()
    }

    #[test]
    fn channel_with_three_taps_in_a_hundred() {
        let mut rng = RngStream::new(1);
        let h = gen_sparse_channel(100, 3, AmplitudeLaw::uniform(), &mut rng).unwrap();
        assert_eq!(h.delay_spread(), 100);
        assert_eq!(h.sparsity(), 3);
        assert_eq!(h.taps().iter().filter(|t| **t != 0.0).count(), 3);
        for a in h.amplitudes() {
            assert!((0.1..=1.0).contains(&a.abs()));
        }
    }

    #[test]
    fn dense_and_minimal_channels() {
        let mut rng = RngStream::new(2);
        let h = gen_sparse_channel(5, 5, AmplitudeLaw::uniform(), &mut rng).unwrap();
        assert_eq!(h.support(), &[0, 1, 2, 3, 4]);
        let h = gen_sparse_channel(10, 1, AmplitudeLaw::uniform(), &mut rng).unwrap();
        assert_eq!(h.sparsity(), 1);
        assert!(h.amplitudes()[0] != 0.0);
    }

    #[test]
    fn gaussian_law_is_clipped() {
        let mut rng = RngStream::new(3);
        let law = AmplitudeLaw::GaussianClipped { std_dev: 2.0 };
        let h = gen_sparse_channel(50, 50, law, &mut rng).unwrap();
        assert!(h.taps().iter().all(|t| t.abs() <= 1.0 && *t != 0.0));
        assert!(h.taps().iter().any(|t| t.abs() == 1.0));
    }

    #[test]
    fn channel_errors() {
        let mut rng = RngStream::new(0);
        assert!(gen_sparse_channel(4, 5, AmplitudeLaw::uniform(), &mut rng).is_err());
        assert!(gen_sparse_channel(4, 0, AmplitudeLaw::uniform(), &mut rng).is_err());
        assert!(SparseChannel::from_taps(DVector::from_vec(vec![0.0, 1.5])).is_err());
    }

    #[test]
    fn training_sequences() {
        let mut rng = RngStream::new(4);
        let c = gen_training(200, &mut rng).unwrap();
        assert_eq!(c.len(), 200);
        assert!(c.symbols().iter().all(|s| s.abs() == 1.0));
        let c = gen_training(1, &mut rng).unwrap();
        assert_eq!(c.len(), 1);
        let c = gen_training(8, &mut rng).unwrap();
        let mean = c.symbols().iter().sum::<f64>() / 8.0;
        assert!((-1.0..=1.0).contains(&mean));
        assert!(gen_training(0, &mut rng).is_err());
        assert!(TrainingSequence::new(vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn impulse_training_gives_identity_block() {
        let basis = build_convolution(&training(&[1.0]), 2, false).unwrap();
        assert_eq!(basis.matrix().to_row_major(), vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn two_symbol_training_layout() {
        let basis = build_convolution(&training(&[1.0, -1.0]), 2, false).unwrap();
        assert_eq!(
            basis.matrix().to_row_major(),
            vec![1.0, 0.0, -1.0, 1.0, 0.0, -1.0]
        );
    }

    #[test]
    fn full_size_basis_columns() {
        let mut rng = RngStream::new(5);
        let c = gen_training(200, &mut rng).unwrap();
        let raw = build_convolution(&c, 100, false).unwrap();
        assert_eq!((raw.matrix().nrows(), raw.matrix().ncols()), (299, 100));
        for norm in raw.matrix().column_norms() {
            assert!((norm - 200f64.sqrt()).abs() < 1e-12);
        }
        let unit = build_convolution(&c, 100, true).unwrap();
        for norm in unit.matrix().column_norms() {
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_transmit_is_exact() {
        // M = 4, N = 3, single tap of 0.5 at delay 1: the block is the
        // training sequence shifted by one and halved.
        let c = training(&[1.0, -1.0, -1.0, 1.0]);
        let basis = build_convolution(&c, 3, false).unwrap();
        let h = SparseChannel::from_taps(DVector::from_vec(vec![0.0, 0.5, 0.0])).unwrap();
        let mut rng = RngStream::new(6);
        let r = transmit(&basis, &h, 0.0, &mut rng).unwrap();
        assert_eq!(r.samples().as_slice(), &[0.0, 0.5, -0.5, -0.5, 0.5, 0.0]);
        assert_eq!(rng.position(), 0);
    }

    #[test]
    fn pure_noise_has_unit_variance() {
        let mut rng = RngStream::new(7);
        let c = gen_training(9_900, &mut rng).unwrap();
        let basis = build_convolution(&c, 101, true).unwrap();
        let h = SparseChannel::zero(101).unwrap();
        let r = transmit(&basis, &h, 1.0, &mut rng).unwrap();
        assert_eq!(r.len(), 10_000);
        let mean = r.samples().mean();
        let var = r.samples().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 9_999.0;
        assert!((var - 1.0).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn transmit_rejects_negative_sigma_and_mismatch() {
        let mut rng = RngStream::new(8);
        let basis = build_convolution(&training(&[1.0, 1.0]), 3, true).unwrap();
        let h = SparseChannel::zero(3).unwrap();
        assert!(transmit(&basis, &h, -1.0, &mut rng).is_err());
        let h4 = SparseChannel::zero(4).unwrap();
        assert!(transmit(&basis, &h4, 0.1, &mut rng).is_err());
    }

    #[test]
    fn snr_mapping() {
        // M = 4, N = 3, h = (1, 0, -0.5): C·h = (1, -1, -1.5, 1.5, 0.5, -0.5)
        // with ‖C·h‖² = 1 + 1 + 2.25 + 2.25 + 0.25 + 0.25 = 7, so P_x = 7/6.
        let c = training(&[1.0, -1.0, -1.0, 1.0]);
        let basis = build_convolution(&c, 3, false).unwrap();
        let h = SparseChannel::from_taps(DVector::from_vec(vec![1.0, 0.0, -0.5])).unwrap();
        let x = basis.apply(&h).unwrap();
        assert_eq!(x.as_slice(), &[1.0, -1.0, -1.5, 1.5, 0.5, -0.5]);
        let p = 7.0 / 6.0;
        let s0 = snr_to_sigma(0.0, &basis, &h).unwrap();
        assert!((s0 * s0 - p).abs() < 1e-14);
        let s10 = snr_to_sigma(10.0, &basis, &h).unwrap();
        assert!((s10 - (p / 10.0).sqrt()).abs() < 1e-14);
        let far = snr_to_sigma(300.0, &basis, &h).unwrap();
        assert!(far < 1e-14);
        assert!(snr_to_sigma(0.0, &basis, &SparseChannel::zero(3).unwrap()).is_err());
    }
}
