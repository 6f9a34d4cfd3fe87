//! Dense complex N×N matrices, the elements of B(ℂ^N).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{shape_err, LabError, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// A square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct Matrix(DMatrix<C64>);

impl Matrix {
    /// Builds an `n`×`n` matrix from row-major entries.
    pub fn new(n: usize, row_major: &[C64]) -> Result<Self> {
        if n == 0 {
            return Err(LabError::InvalidSpec("matrix dimension must be positive".into()));
        }
        if row_major.len() != n * n {
            return shape_err(format!("expected {} entries, got {}", n * n, row_major.len()));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(n, n, row_major))
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return shape_err(format!(
                "matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            ));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LabError::InvalidSpec("matrix entries must be finite".into()));
        }
        Ok(Matrix(m))
    }

    /// Wraps without validation; callers guarantee squareness and finiteness.
    pub(crate) fn wrap(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Matrix(m)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Matrix(DMatrix::from_fn(n, n, f))
    }

    pub fn zeros(n: usize) -> Self {
        Matrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    /// Matrix unit with a single 1 at `(row, col)`.
    pub fn unit(n: usize, row: usize, col: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(row, col)] = ONE;
        Matrix(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Matrix::from_fn(n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn row_major(&self) -> Vec<C64> {
        let n = self.dim();
        (0..n * n).map(|k| self.0[(k / n, k % n)]).collect()
    }

    /// Column-major stacking `vec(M)`; entry `(p, q)` lands at `q·N + p`.
    pub fn vec(&self) -> Vec<C64> {
        self.0.as_slice().to_vec()
    }

    pub fn from_vec(n: usize, column_major: &[C64]) -> Self {
        Matrix(DMatrix::from_column_slice(n, n, column_major))
    }

    fn check_same(&self, other: &Matrix) -> Result<()> {
        if self.dim() != other.dim() {
            return shape_err(format!(
                "{}x{} vs {}x{}",
                self.dim(),
                self.dim(),
                other.dim(),
                other.dim()
            ));
        }
        Ok(())
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same(other)?;
        Ok(self * other)
    }

    pub fn checked_add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same(other)?;
        Ok(self - other)
    }

    pub fn scale(&self, c: C64) -> Matrix {
        Matrix(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Matrix {
        self.scale(C64::new(c, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        Matrix(self.0.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        spectral_norm_of(&self.0)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Trace inner product `tr(self* · other)`.
    pub fn inner(&self, other: &Matrix) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }
}

pub(crate) fn spectral_norm_of(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() || m.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    m.clone().singular_values().max()
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}", self.0)
    }
}

// Operator forms panic on shape mismatch, like nalgebra; use the `checked_*`
// methods on untrusted inputs.
impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 * &rhs.0)
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 + &rhs.0)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        Matrix(&self.0 - &rhs.0)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix(-&self.0)
    }
}
