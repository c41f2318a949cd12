//! Dense numeric kernels shared by the rest of the crate.

mod fit;
mod matrix;
mod rng;
mod spectral;

pub use fit::{linear_fit, LinearFit};
pub use matrix::{rademacher_matrix, Matrix};
pub use rng::{mix64, RngStream};
pub use spectral::{
    spectral_top, trace_inverse_gram, ColumnSelection, GramTrace, PINV_RELATIVE_CUTOFF,
    POWER_MAX_ITERS, POWER_REL_TOL,
};
