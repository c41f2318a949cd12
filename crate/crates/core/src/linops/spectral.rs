use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{Matrix, RngStream};
use crate::{Error, Result};

/// Relative change in the Rayleigh quotient that ends power iteration.
pub const POWER_REL_TOL: f64 = 1e-13;
pub const POWER_MAX_ITERS: usize = 50_000;

/// Gram eigenvalues at or below this fraction of the largest one count as
/// zero in pseudo-inverse traces.
pub const PINV_RELATIVE_CUTOFF: f64 = 1e-10;

const POWER_START_SEED: u64 = 0x5EED_0F_90E7;
const POWER_START_JITTER: f64 = 1e-3;

/// Largest eigenvalue of `AᵀA` by power iteration.
///
/// Iterates on whichever of `AᵀA` and `AAᵀ` is smaller; both share the
/// nonzero spectrum. The start vector is all-ones plus a small fixed-seed
/// Gaussian perturbation, so the result is deterministic.
pub fn spectral_top(a: &Matrix) -> Result<f64> {
    let gram: DMatrix<f64> = if a.nrows() < a.ncols() {
        a.as_dmatrix() * a.transpose()
    } else {
        a.tr_mul(a.as_dmatrix())
    };
    let n = gram.nrows();

    let mut jitter = RngStream::new(POWER_START_SEED);
    let mut v = DVector::from_fn(n, |_, _| 1.0 + POWER_START_JITTER * jitter.gaussian());
    v /= v.norm();

    let mut prev = f64::NAN;
    for _ in 0..POWER_MAX_ITERS {
        let w = &gram * &v;
        let rayleigh = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            // Start vector lies in the null space; for a PSD gram with a
            // non-orthogonal start this only happens when A = 0.
            return Ok(0.0);
        }
        if (rayleigh - prev).abs() <= POWER_REL_TOL * rayleigh.abs() {
            return Ok(rayleigh);
        }
        prev = rayleigh;
        v = w / norm;
    }
    Err(Error::Convergence {
        what: "power iteration",
        iterations: POWER_MAX_ITERS,
        last: prev,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnSelection<'a> {
    All,
    Subset(&'a [usize]),
}

/// Trace of the (pseudo-)inverse of a column-restricted gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GramTrace {
    pub trace: f64,
    /// Number of eigenvalues above the pseudo-inverse cutoff.
    pub rank: usize,
    pub dim: usize,
}

impl GramTrace {
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.dim
    }

    pub fn compute(a: &Matrix, selection: ColumnSelection<'_>) -> Result<GramTrace> {
        let gram = match selection {
            ColumnSelection::All => a.tr_mul(a.as_dmatrix()),
            ColumnSelection::Subset(cols) => {
                let sub = a.select_columns(cols)?;
                sub.tr_mul(sub.as_dmatrix())
            }
        };
        let dim = gram.nrows();
        let eig = SymmetricEigen::new(gram).eigenvalues;
        let top = eig.iter().cloned().fold(0.0_f64, f64::max);
        let cutoff = PINV_RELATIVE_CUTOFF * top;
        let mut trace = 0.0;
        let mut rank = 0;
        for &e in eig.iter() {
            if e > cutoff && e > 0.0 {
                trace += 1.0 / e;
                rank += 1;
            }
        }
        Ok(GramTrace { trace, rank, dim })
    }
}

/// `trace{(A_SᵀA_S)†}` for the selected columns `S`.
pub fn trace_inverse_gram(a: &Matrix, selection: ColumnSelection<'_>) -> Result<f64> {
    GramTrace::compute(a, selection).map(|g| g.trace)
}
