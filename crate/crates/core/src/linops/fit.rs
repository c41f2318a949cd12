use crate::{Error, Result};

/// Least-squares line `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    /// Euclidean norm of `ys − intercept − slope·xs`.
    pub residual_norm: f64,
}

impl LinearFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least-squares line through `(xs, ys)`.
///
/// Uses centred sums, which keeps the normal equations well conditioned
/// when the abscissae are large compared with their spread.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::dimension("linear fit", xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::Domain(format!(
            "linear fit needs at least 2 points, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let scale = xs.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    if sxx <= f64::EPSILON * scale * scale * n {
        return Err(Error::Singular("all abscissae are identical".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residual_norm = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(LinearFit {
        intercept,
        slope,
        residual_norm,
    })
}
