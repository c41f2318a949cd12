use nalgebra::DVector;

use super::Estimate;
use crate::measurement::EffectiveMatrix;
use crate::signal::{ConvolutionBasis, ReceivedSignal};
use crate::{Error, Result};

/// Per-tap normalized correlation `ĥ(n) = c_nᵀr / ‖c_n‖²`.
pub fn sliding_correlator(basis: &ConvolutionBasis, r: &ReceivedSignal) -> Result<Estimate> {
    let c = basis.matrix();
    let corr = c.tr_mul_vec(r.samples())?;
    let norms = c.column_norms();
    let mut h = DVector::zeros(c.ncols());
    for (n, norm) in norms.iter().enumerate() {
        if *norm == 0.0 {
            return Err(Error::Singular(format!("column {n} of the basis is zero")));
        }
        h[n] = corr[n] / (norm * norm);
    }
    Estimate::new(h, "sliding", 0)
}

/// `ĥ = Aᵀy`.
pub fn max_energy(a: &EffectiveMatrix, y: &DVector<f64>) -> Result<Estimate> {
    Estimate::new(a.matrix().tr_mul_vec(y)?, "max_energy", 0)
}
