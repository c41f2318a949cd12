use std::ops::Deref;

use nalgebra::{DMatrix, DVector};

use super::RngStream;
use crate::{Error, Result};

/// Dense real matrix with at least one row and one column and only finite
/// entries.
///
/// Storage is `nalgebra`'s column-major `DMatrix`; constructors that take a
/// flat slice expect row-major order. The wrapper dereferences to the inner
/// matrix for read-only arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl Matrix {
    pub fn new(inner: DMatrix<f64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::dimension(
                "matrix",
                "at least 1x1",
                format!("{}x{}", inner.nrows(), inner.ncols()),
            ));
        }
        if let Some(bad) = inner.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite matrix entry {bad}")));
        }
        Ok(Matrix(inner))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::dimension(
                "matrix entries",
                rows * cols,
                entries.len(),
            ));
        }
        Self::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.transpose().as_slice().to_vec()
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.ncols() != rhs.nrows() {
            return Err(Error::dimension("matmul", self.ncols(), rhs.nrows()));
        }
        Matrix::new(&self.0 * &rhs.0)
    }

    pub fn mul_vec(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if self.ncols() != v.len() {
            return Err(Error::dimension("matrix-vector product", self.ncols(), v.len()));
        }
        Ok(&self.0 * v)
    }

    /// `selfᵀ · v`.
    pub fn tr_mul_vec(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if self.nrows() != v.len() {
            return Err(Error::dimension(
                "transposed matrix-vector product",
                self.nrows(),
                v.len(),
            ));
        }
        Ok(self.0.tr_mul(v))
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.0.column_iter().map(|c| c.norm()).collect()
    }

    pub fn select_columns(&self, columns: &[usize]) -> Result<Matrix> {
        if columns.is_empty() {
            return Err(Error::Domain("empty column selection".into()));
        }
        if let Some(&bad) = columns.iter().find(|&&j| j >= self.ncols()) {
            return Err(Error::Domain(format!(
                "column {bad} out of range for {} columns",
                self.ncols()
            )));
        }
        Matrix::new(self.0.select_columns(columns))
    }

    pub fn scaled(&self, factor: f64) -> Result<Matrix> {
        Matrix::new(&self.0 * factor)
    }
}

impl Deref for Matrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Matrix of i.i.d. ±1 draws, optionally divided by `√rows` so every column
/// has unit Euclidean norm.
///
/// Entries are drawn in row-major order.
pub fn rademacher_matrix(
    rows: usize,
    cols: usize,
    rng: &mut RngStream,
    column_normalize: bool,
) -> Result<Matrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::dimension("rademacher matrix", "at least 1x1", format!("{rows}x{cols}")));
    }
    let scale = if column_normalize {
        1.0 / (rows as f64).sqrt()
    } else {
        1.0
    };
    let entries: Vec<f64> = (0..rows * cols).map(|_| rng.sign() * scale).collect();
    Matrix::from_row_slice(rows, cols, &entries)
}
