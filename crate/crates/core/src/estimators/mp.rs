use nalgebra::DVector;

use super::Estimate;
use crate::linops::Matrix;
use crate::{Error, Result};

/// Classic matching pursuit with `s` iterations.
///
/// Each step picks the column with the largest normalized correlation
/// `|d_jᵀr| / ‖d_j‖`, adds `d_jᵀr / ‖d_j‖²` to its coefficient and removes
/// that component from the residual. Coefficients accumulate when a column is
/// picked again; earlier coefficients are never refitted. Works on either the
/// effective matrix with projected measurements or the convolution basis with
/// the full received block.
pub fn matching_pursuit(dictionary: &Matrix, y: &DVector<f64>, s: usize) -> Result<Estimate> {
    if s == 0 {
        return Err(Error::Domain("matching pursuit needs at least one iteration".into()));
    }
    if dictionary.nrows() != y.len() {
        return Err(Error::dimension("matching pursuit", dictionary.nrows(), y.len()));
    }
    let norms = dictionary.column_norms();
    let mut residual = y.clone();
    let mut coeffs = DVector::zeros(dictionary.ncols());
    for _ in 0..s {
        let corr = dictionary.tr_mul(&residual);
        let mut best: Option<(usize, f64)> = None;
        for (j, (&c, &norm)) in corr.iter().zip(&norms).enumerate() {
            if norm == 0.0 {
                continue;
            }
            let score = c.abs() / norm;
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((j, score));
            }
        }
        let Some((j, score)) = best else { break };
        if score == 0.0 {
            break;
        }
        let coef = corr[j] / (norms[j] * norms[j]);
        coeffs[j] += coef;
        residual.axpy(-coef, &dictionary.column(j), 1.0);
    }
    Estimate::new(coeffs, "mp", s)
}
