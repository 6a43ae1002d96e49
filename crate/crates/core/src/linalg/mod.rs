//! Dense matrices, the thin SVD, and the shrinkage operators the solvers are
//! assembled from.

mod prox;
mod svd;

pub use prox::{ld_shrink, ld_shrink_value, log_det_surrogate, soft_threshold, soft_threshold_value, svt};
pub use svd::{polar_orthogonal, thin_svd, ThinSvd};

pub(crate) use prox::ld_shrink_in_place;
pub(crate) use svd::{orthonormality_error, polar_na, thin_svd_na};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A finite real matrix of non-zero size.
///
/// Storage is column-major (it wraps a [`DMatrix`]); the row-major accessors
/// exist for file formats and callers that think in rows.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix(DMatrix<f64>);

impl DenseMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        check_shape(rows, cols)?;
        if entries.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_nalgebra(DMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Wraps an nalgebra matrix after checking shape and finiteness.
    pub fn from_nalgebra(inner: DMatrix<f64>) -> Result<Self> {
        check_shape(inner.nrows(), inner.ncols())?;
        if let Some(pos) = inner.iter().position(|v| !v.is_finite()) {
            let (r, c) = (pos % inner.nrows(), pos / inner.nrows());
            return Err(Error::InvalidInput(format!("non-finite entry at ({r}, {c})")));
        }
        Ok(Self(inner))
    }

    /// Builds a matrix entry by entry; `f` receives `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_shape(rows, cols)?;
        Self::from_nalgebra(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        check_shape(rows, columns.len())?;
        if let Some(j) = columns.iter().position(|c| c.len() != rows) {
            return Err(Error::InvalidArgument(format!("column {j} has length {}, expected {rows}", columns[j].len())));
        }
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "matrix dimensions must be positive");
        Self(DMatrix::identity(n, n))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// Internal constructor for results of arithmetic on finite matrices.
    pub(crate) fn from_na_unchecked(inner: DMatrix<f64>) -> Self {
        debug_assert!(inner.nrows() > 0 && inner.ncols() > 0);
        Self(inner)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<f64> {
        self.0
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.transpose().as_slice().to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::InvalidArgument(format!("cannot multiply {:?} by {:?}", self.shape(), rhs.shape())));
        }
        Self::from_nalgebra(&self.0 * &rhs.0)
    }

    pub fn add(&self, rhs: &DenseMatrix) -> Result<Self> {
        self.same_shape(rhs, "add")?;
        Self::from_nalgebra(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Result<Self> {
        self.same_shape(rhs, "subtract")?;
        Self::from_nalgebra(&self.0 - &rhs.0)
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        Self::from_nalgebra(&self.0 * factor)
    }

    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::from_nalgebra(self.0.map(f))
    }

    /// Number of entries with `|x| > abs_tol`.
    pub fn count_above(&self, abs_tol: f64) -> usize {
        self.0.iter().filter(|v| v.abs() > abs_tol).count()
    }

    /// Sum of absolute values of all entries.
    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    fn same_shape(&self, rhs: &DenseMatrix, op: &str) -> Result<()> {
        if self.shape() != rhs.shape() {
            return Err(Error::InvalidArgument(format!("cannot {op} {:?} and {:?}", self.shape(), rhs.shape())));
        }
        Ok(())
    }
}

fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!("matrix dimensions must be positive, got {rows}x{cols}")));
    }
    Ok(())
}
