//! Finite-dimensional C*-algebras ⊕ M_{n_i}(ℂ) acting block-diagonally on ℂ^N.
//!
//! The canonical basis lists the matrix units block by block; inside block
//! `b` the units `E^b_{ij}` are ordered row-major in `(i, j)`. File formats and
//! superoperator columns depend on this order.

use crate::error::{shape_err, LabError, Result};
use crate::matrix::{Matrix, C64, ZERO};

/// Comparison thresholds shared by every check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance for identities, applied as `identity_tol · max(1, scale)`.
    pub identity_tol: f64,
    /// Rank cutoff factor, applied as `σ_max · rows · rank_tol_factor`.
    pub rank_tol_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity_tol: 1e-9,
            rank_tol_factor: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn new(identity_tol: f64, rank_tol_factor: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(identity_tol) || !ok(rank_tol_factor) {
            return Err(LabError::InvalidSpec(
                "tolerances must be finite and nonnegative".into(),
            ));
        }
        Ok(Tolerances {
            identity_tol,
            rank_tol_factor,
        })
    }

    pub fn passes(&self, residual: f64, scale: f64) -> bool {
        residual <= self.identity_tol * scale.max(1.0)
    }

    /// Singular values above this are counted in the rank.
    pub fn rank_threshold(&self, sigma_max: f64, rows: usize) -> f64 {
        sigma_max * rows as f64 * self.rank_tol_factor
    }
}

/// Location of one matrix unit inside the block-diagonal pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitPos {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    /// Global row/column in ℂ^N.
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarAlgebra {
    blocks: Vec<usize>,
    offsets: Vec<usize>,
    basis_offsets: Vec<usize>,
    n: usize,
    dim: usize,
}

impl StarAlgebra {
    pub fn new(blocks: &[usize]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(LabError::InvalidSpec("algebra needs at least one block".into()));
        }
        if blocks.contains(&0) {
            return Err(LabError::InvalidSpec("block sizes must be positive".into()));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut basis_offsets = Vec::with_capacity(blocks.len());
        let (mut n, mut dim) = (0, 0);
        for &b in blocks {
            offsets.push(n);
            basis_offsets.push(dim);
            n += b;
            dim += b * b;
        }
        Ok(StarAlgebra {
            blocks: blocks.to_vec(),
            offsets,
            basis_offsets,
            n,
            dim,
        })
    }

    /// The full matrix algebra M_n.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Size N of the underlying Hilbert space ℂ^N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Linear dimension D = Σ n_i².
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit_pos(&self, idx: usize) -> Result<UnitPos> {
        if idx >= self.dim {
            return Err(LabError::Index {
                index: idx,
                len: self.dim,
            });
        }
        let block = self.basis_offsets.partition_point(|&o| o <= idx) - 1;
        let local = idx - self.basis_offsets[block];
        let size = self.blocks[block];
        let (i, j) = (local / size, local % size);
        let off = self.offsets[block];
        Ok(UnitPos {
            block,
            i,
            j,
            row: off + i,
            col: off + j,
        })
    }

    fn index_of(&self, block: usize, i: usize, j: usize) -> usize {
        self.basis_offsets[block] + i * self.blocks[block] + j
    }

    pub fn basis_element(&self, idx: usize) -> Result<Matrix> {
        let p = self.unit_pos(idx)?;
        Ok(Matrix::unit(self.n, p.row, p.col))
    }

    pub fn basis(&self) -> Vec<Matrix> {
        (0..self.dim)
            .map(|i| self.basis_element(i).expect("in range"))
            .collect()
    }

    /// Index of `E_idx*`, which is again a basis unit.
    pub fn adjoint_index(&self, idx: usize) -> usize {
        let p = self.unit_pos(idx).expect("basis index in range");
        self.index_of(p.block, p.j, p.i)
    }

    /// `E_a · E_b` is either zero or another basis unit.
    pub fn product_index(&self, a: usize, b: usize) -> Option<usize> {
        let pa = self.unit_pos(a).expect("basis index in range");
        let pb = self.unit_pos(b).expect("basis index in range");
        (pa.block == pb.block && pa.j == pb.i).then(|| self.index_of(pa.block, pa.i, pb.j))
    }

    /// Index of the basis unit sitting at global `(row, col)`, if any.
    pub fn index_at(&self, row: usize, col: usize) -> Option<usize> {
        let b = self.offsets.partition_point(|&o| o <= row) - 1;
        let (off, size) = (self.offsets[b], self.blocks[b]);
        (col >= off && col < off + size).then(|| self.index_of(b, row - off, col - off))
    }

    /// Block-diagonal identity.
    pub fn identity(&self) -> Matrix {
        Matrix::identity(self.n)
    }

    pub fn identity_coeffs(&self) -> Vec<C64> {
        let mut c = vec![ZERO; self.dim];
        for (b, &size) in self.blocks.iter().enumerate() {
            for i in 0..size {
                c[self.index_of(b, i, i)] = C64::new(1.0, 0.0);
            }
        }
        c
    }

    pub fn embed(&self, coeffs: &[C64]) -> Result<Matrix> {
        if coeffs.len() != self.dim {
            return shape_err(format!("expected {} coefficients, got {}", self.dim, coeffs.len()));
        }
        let mut m = Matrix::zeros(self.n).into_dmatrix();
        for (idx, &c) in coeffs.iter().enumerate() {
            let p = self.unit_pos(idx)?;
            m[(p.row, p.col)] = c;
        }
        Ok(Matrix::wrap(m))
    }

    /// Trace-inner-product coordinates of `m` and the Frobenius norm of the
    /// part of `m` orthogonal to the algebra.
    pub fn coeffs_of(&self, m: &Matrix) -> Result<(Vec<C64>, f64)> {
        self.check_dim(m)?;
        let coeffs = (0..self.dim)
            .map(|idx| {
                let p = self.unit_pos(idx).expect("in range");
                m.get(p.row, p.col)
            })
            .collect();
        Ok((coeffs, self.off_pattern_norm(m)))
    }

    fn off_pattern_norm(&self, m: &Matrix) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.n {
            for c in 0..self.n {
                if self.index_at(r, c).is_none() {
                    acc += m.get(r, c).norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    /// Membership residual: norm of the off-pattern component.
    pub fn membership_residual(&self, m: &Matrix) -> Result<f64> {
        self.check_dim(m)?;
        Ok(self.off_pattern_norm(m))
    }

    pub fn contains(&self, m: &Matrix, tol: &Tolerances) -> Result<bool> {
        let r = self.membership_residual(m)?;
        Ok(tol.passes(r, m.frobenius_norm()))
    }

    /// Orthogonal projection of `m` onto the algebra (zeroes off-pattern entries).
    pub fn project(&self, m: &Matrix) -> Result<Matrix> {
        let (c, _) = self.coeffs_of(m)?;
        self.embed(&c)
    }

    pub(crate) fn check_dim(&self, m: &Matrix) -> Result<()> {
        if m.dim() != self.n {
            return shape_err(format!("matrix dim {} does not match algebra N = {}", m.dim(), self.n));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_examples() {
        let a = StarAlgebra::new(&[2, 3]).unwrap();
        assert_eq!((a.n(), a.dim()), (5, 13));
        let s = StarAlgebra::new(&[1]).unwrap();
        assert_eq!((s.n(), s.dim()), (1, 1));
        assert!(matches!(StarAlgebra::new(&[]), Err(LabError::InvalidSpec(_))));
        assert!(StarAlgebra::new(&[2, 0]).is_err());
    }

    #[test]
    fn basis_order() {
        let a = StarAlgebra::full(2).unwrap();
        assert_eq!(a.basis_element(0).unwrap(), Matrix::unit(2, 0, 0));
        assert_eq!(a.basis_element(1).unwrap(), Matrix::unit(2, 0, 1));
        let d = StarAlgebra::new(&[1, 1]).unwrap();
        assert_eq!(d.basis_element(1).unwrap(), Matrix::unit(2, 1, 1));
        assert!(matches!(a.basis_element(4), Err(LabError::Index { .. })));
    }

    #[test]
    fn embed_and_coeffs() {
        let a = StarAlgebra::full(2).unwrap();
        let one = C64::new(1.0, 0.0);
        assert_eq!(a.embed(&[one, ZERO, ZERO, ZERO]).unwrap(), Matrix::unit(2, 0, 0));
        let (c, r) = a.coeffs_of(&Matrix::identity(2)).unwrap();
        assert_eq!(c, a.identity_coeffs());
        assert_eq!(r, 0.0);

        let d = StarAlgebra::new(&[1, 1]).unwrap();
        let (c, r) = d.coeffs_of(&Matrix::unit(2, 0, 1)).unwrap();
        assert!(c.iter().all(|z| *z == ZERO));
        assert_eq!(r, 1.0);
        assert!(a.embed(&[one]).is_err());
        assert!(a.coeffs_of(&Matrix::identity(3)).is_err());
    }

    #[test]
    fn contains_examples() {
        let tol = Tolerances::default();
        let d = StarAlgebra::new(&[1, 1]).unwrap();
        assert!(d.contains(&d.identity(), &tol).unwrap());
        assert!(!d.contains(&Matrix::unit(2, 0, 1), &tol).unwrap());
        assert!(d.contains(&Matrix::zeros(2), &tol).unwrap());
    }

    #[test]
    fn basis_closed_and_orthonormal() {
        let a = StarAlgebra::new(&[2, 1, 3]).unwrap();
        let basis = a.basis();
        for (i, ei) in basis.iter().enumerate() {
            assert_eq!(a.membership_residual(&ei.adjoint()).unwrap(), 0.0);
            assert_eq!(basis[a.adjoint_index(i)], ei.adjoint());
            for (j, ej) in basis.iter().enumerate() {
                let prod = ei * ej;
                assert_eq!(a.membership_residual(&prod).unwrap(), 0.0);
                match a.product_index(i, j) {
                    Some(k) => assert_eq!(prod, basis[k]),
                    None => assert!(prod.is_zero()),
                }
                let ip = ei.inner(ej);
                assert_eq!(ip, if i == j { C64::new(1.0, 0.0) } else { ZERO });
            }
        }
        assert_eq!(a.membership_residual(&a.identity()).unwrap(), 0.0);
    }
}
