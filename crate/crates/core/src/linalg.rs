//! Rank-revealing helpers: nullspaces, range bases, subspace angles.

use nalgebra::{ComplexField, DMatrix};

use crate::algebra::Tolerances;
use crate::matrix::{Matrix, C64};

/// Orthonormal nullspace basis (columns) plus the audit trail of the rank decision.
#[derive(Clone, Debug)]
pub struct NullSpace<T: ComplexField> {
    pub basis: DMatrix<T>,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

impl<T: ComplexField> NullSpace<T> {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Nullspace of `a` with cutoff `σ_max · rows · rank_tol_factor`.
///
/// Tall systems are first reduced to their `R` factor; the singular values of
/// `R` and `a` coincide.
pub fn nullspace<T>(a: &DMatrix<T>, tol: &Tolerances) -> NullSpace<T>
where
    T: ComplexField<RealField = f64>,
{
    let (m, n) = a.shape();
    if n == 0 {
        return NullSpace {
            basis: DMatrix::zeros(0, 0),
            singular_values: vec![],
            threshold: 0.0,
        };
    }
    let square = if m > n {
        a.clone().qr().r()
    } else {
        let mut padded = DMatrix::<T>::zeros(n, n);
        padded.rows_mut(0, m).copy_from(a);
        padded
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..n).collect();
    let sv = svd.singular_values;
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(std::cmp::Ordering::Equal));
    let singular_values: Vec<f64> = order.iter().map(|&i| sv[i]).take(m.min(n)).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let threshold = tol.rank_threshold(sigma_max, m);
    let null_idx: Vec<usize> = order.iter().copied().filter(|&i| sv[i] <= threshold).collect();
    let mut basis = DMatrix::<T>::zeros(n, null_idx.len());
    for (c, &i) in null_idx.iter().enumerate() {
        for r in 0..n {
            basis[(r, c)] = v_t[(i, r)].clone().conjugate();
        }
    }
    NullSpace {
        basis,
        singular_values,
        threshold,
    }
}

/// Orthonormal basis of the column span of `b` (an N×K stack) with the
/// cutoff `σ_max · N · rank_tol_factor`, and all singular values.
pub fn range_basis(b: &DMatrix<C64>, tol: &Tolerances) -> (DMatrix<C64>, Vec<f64>) {
    range_basis_above(b, tol, 0.0)
}

/// Like [`range_basis`], but the cutoff uses `max(σ_max, reference)` so that a
/// stack which is pure rounding noise relative to `reference` has rank 0.
pub fn range_basis_above(b: &DMatrix<C64>, tol: &Tolerances, reference: f64) -> (DMatrix<C64>, Vec<f64>) {
    let (n, k) = b.shape();
    if k == 0 || n == 0 {
        return (DMatrix::zeros(n, 0), vec![]);
    }
    let svd = b.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let sv = svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(std::cmp::Ordering::Equal));
    let singular_values: Vec<f64> = order.iter().map(|&i| sv[i]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let threshold = tol.rank_threshold(sigma_max.max(reference), n);
    let keep: Vec<usize> = order.iter().copied().filter(|&i| sv[i] > threshold).collect();
    let mut basis = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &u.column(i));
    }
    (basis, singular_values)
}

/// Orthonormal basis of the range of an orthogonal projection: the
/// eigenvectors with eigenvalue near 1.
pub fn projection_range(p: &Matrix) -> DMatrix<C64> {
    let n = p.dim();
    let eig = p.as_dmatrix().clone().symmetric_eigen();
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    let mut basis = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &eig.eigenvectors.column(i));
    }
    basis
}

/// `Q Q*` for a matrix with orthonormal columns.
pub fn projector(q: &DMatrix<C64>) -> Matrix {
    Matrix::wrap(q * q.adjoint())
}

/// Largest principal angle between two subspaces given by orthonormal column
/// bases. Subspaces of different dimension are at distance π/2.
pub fn subspace_distance<T>(q1: &DMatrix<T>, q2: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64>,
{
    if q1.ncols() != q2.ncols() || q1.nrows() != q2.nrows() {
        return std::f64::consts::FRAC_PI_2;
    }
    if q1.ncols() == 0 {
        return 0.0;
    }
    let resid = q2 - q1 * (q1.adjoint() * q2);
    let s = resid.singular_values().max();
    s.min(1.0).asin()
}

/// Unitary polar factor `U V*` of `m = U S V*`.
pub fn polar_factor(m: &DMatrix<C64>) -> DMatrix<C64> {
    let svd = m.clone().svd(true, true);
    svd.u.expect("U") * svd.v_t.expect("V*")
}
