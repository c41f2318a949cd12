use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// SplitMix64 finalizer. Used to derive child seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seeded random stream backed by ChaCha8.
///
/// The generator is `ChaCha8Rng::seed_from_u64(seed)`, so a seed reproduces
/// the same draws on every platform. `position` counts logical draws (one per
/// sign, uniform, Gaussian or bounded-integer request).
///
/// Streams are single-owner. Concurrent work derives independent children
/// with [`RngStream::fork`]; a child depends only on the parent seed and the
/// tag, never on how far the parent has advanced.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    position: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            position: 0,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    /// Child stream with seed `mix64(seed ^ mix64(tag))`.
    pub fn fork(&self, tag: u64) -> RngStream {
        RngStream::new(mix64(self.seed ^ mix64(tag)))
    }

    /// Uniform draw from {+1, −1}.
    pub fn sign(&mut self) -> f64 {
        self.position += 1;
        if self.inner.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.position += 1;
        lo + (hi - lo) * self.inner.random::<f64>()
    }

    pub fn gaussian(&mut self) -> f64 {
        self.position += 1;
        self.inner.sample(StandardNormal)
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.position += 1;
        self.inner.random_range(0..n)
    }

    /// `k` distinct indices drawn uniformly from `0..n` (partial
    /// Fisher–Yates), returned in ascending order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot draw {k} distinct indices from {n}");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        let mut picked = pool[..k].to_vec();
        picked.sort_unstable();
        picked
    }
}
