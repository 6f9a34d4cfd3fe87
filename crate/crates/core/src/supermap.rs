//! Linear maps 𝔄 → B(ℂ^N) stored by their images on the canonical basis.

use nalgebra::DMatrix;

use crate::algebra::{StarAlgebra, Tolerances};
use crate::error::{shape_err, Result};
use crate::matrix::{Matrix, C64};
use crate::par;

#[derive(Clone, Debug, PartialEq)]
pub struct SuperMap {
    alg: StarAlgebra,
    images: Vec<Matrix>,
}

/// Outcome of a yes/no structural test together with its margin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Predicate {
    pub holds: bool,
    pub residual: f64,
    pub scale: f64,
}

impl SuperMap {
    pub fn from_images(alg: &StarAlgebra, images: Vec<Matrix>) -> Result<Self> {
        if images.len() != alg.dim() {
            return shape_err(format!("expected {} images, got {}", alg.dim(), images.len()));
        }
        for m in &images {
            alg.check_dim(m)?;
        }
        Ok(SuperMap {
            alg: alg.clone(),
            images,
        })
    }

    /// The map determined by applying `f` to each basis unit.
    pub fn from_fn(alg: &StarAlgebra, mut f: impl FnMut(&Matrix) -> Matrix) -> Result<Self> {
        let images = alg.basis().iter().map(&mut f).collect();
        Self::from_images(alg, images)
    }

    /// ι, the inclusion 𝔄 → B(ℂ^N).
    pub fn identity(alg: &StarAlgebra) -> Self {
        SuperMap {
            alg: alg.clone(),
            images: alg.basis(),
        }
    }

    pub fn zero(alg: &StarAlgebra) -> Self {
        SuperMap {
            alg: alg.clone(),
            images: vec![Matrix::zeros(alg.n()); alg.dim()],
        }
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.alg
    }

    pub fn images(&self) -> &[Matrix] {
        &self.images
    }

    pub fn image(&self, idx: usize) -> &Matrix {
        &self.images[idx]
    }

    /// N of the codomain B(ℂ^N).
    pub fn n(&self) -> usize {
        self.alg.n()
    }

    /// `Σ_i coeffs_of(a)[i] · images[i]`; off-algebra parts of `a` are ignored.
    pub fn apply(&self, a: &Matrix) -> Result<Matrix> {
        let (coeffs, _) = self.alg.coeffs_of(a)?;
        Ok(self.apply_coeffs(&coeffs))
    }

    pub(crate) fn apply_coeffs(&self, coeffs: &[C64]) -> Matrix {
        let n = self.n();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for (c, img) in coeffs.iter().zip(&self.images) {
            if *c != C64::new(0.0, 0.0) {
                acc += img.as_dmatrix() * *c;
            }
        }
        Matrix::wrap(acc)
    }

    /// Image of the product `E_i E_j` (zero when the units do not chain).
    pub fn image_of_product(&self, i: usize, j: usize) -> Matrix {
        match self.alg.product_index(i, j) {
            Some(k) => self.images[k].clone(),
            None => Matrix::zeros(self.n()),
        }
    }

    /// Multiplicativity defect `σ(E_iE_j) − σ(E_i)σ(E_j)`.
    pub fn defect(&self, i: usize, j: usize) -> Matrix {
        &self.image_of_product(i, j) - &(&self.images[i] * &self.images[j])
    }

    /// `σ*(A) = σ(A*)*`.
    pub fn star_conjugate(&self) -> SuperMap {
        let images = (0..self.alg.dim())
            .map(|i| self.images[self.alg.adjoint_index(i)].adjoint())
            .collect();
        SuperMap {
            alg: self.alg.clone(),
            images,
        }
    }

    /// `(σ + σ*) / 2`, always *-linear.
    pub fn star_part(&self) -> SuperMap {
        self.add(&self.star_conjugate()).expect("same domain").scale_real(0.5)
    }

    /// Largest spectral norm among the images, floored at 1.
    pub fn scale(&self) -> f64 {
        self.images.iter().map(Matrix::spectral_norm).fold(1.0, f64::max)
    }

    pub fn is_star_linear(&self, tol: &Tolerances) -> Predicate {
        let alg = &self.alg;
        let res = par::map_range(alg.dim(), |i| {
            (&self.images[alg.adjoint_index(i)] - &self.images[i].adjoint()).spectral_norm()
        });
        let residual = res.into_iter().fold(0.0, f64::max);
        let scale = self.scale();
        Predicate {
            holds: tol.passes(residual, scale),
            residual,
            scale,
        }
    }

    /// Multiplicativity on all basis pairs, which covers 𝔄 by bilinearity.
    pub fn is_homomorphism(&self, tol: &Tolerances) -> Predicate {
        let d = self.alg.dim();
        let res = par::map_range(d * d, |k| self.defect(k / d, k % d).spectral_norm());
        let residual = res.into_iter().fold(0.0, f64::max);
        let scale = self.scale();
        Predicate {
            holds: tol.passes(residual, scale),
            residual,
            scale,
        }
    }

    /// `A ↦ σ(A) · p`.
    pub fn right_compress(&self, p: &Matrix) -> Result<SuperMap> {
        self.alg.check_dim(p)?;
        Ok(self.map_images(|m| m * p))
    }

    /// `A ↦ p · σ(A)`.
    pub fn left_compress(&self, p: &Matrix) -> Result<SuperMap> {
        self.alg.check_dim(p)?;
        Ok(self.map_images(|m| p * m))
    }

    pub fn map_images(&self, f: impl Fn(&Matrix) -> Matrix) -> SuperMap {
        SuperMap {
            alg: self.alg.clone(),
            images: self.images.iter().map(f).collect(),
        }
    }

    fn check_domain(&self, other: &SuperMap) -> Result<()> {
        if self.alg != other.alg {
            return shape_err(format!(
                "domain mismatch: blocks {:?} vs {:?}",
                self.alg.blocks(),
                other.alg.blocks()
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &SuperMap) -> Result<SuperMap> {
        self.check_domain(other)?;
        let images = self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect();
        Ok(SuperMap {
            alg: self.alg.clone(),
            images,
        })
    }

    pub fn sub(&self, other: &SuperMap) -> Result<SuperMap> {
        self.check_domain(other)?;
        let images = self.images.iter().zip(&other.images).map(|(a, b)| a - b).collect();
        Ok(SuperMap {
            alg: self.alg.clone(),
            images,
        })
    }

    pub fn scale_by(&self, c: C64) -> SuperMap {
        self.map_images(|m| m.scale(c))
    }

    pub fn scale_real(&self, c: f64) -> SuperMap {
        self.scale_by(C64::new(c, 0.0))
    }

    /// N²×D matrix whose column `i` is `vec(images[i])` (column-major entries).
    pub fn matricize(&self) -> DMatrix<C64> {
        let n2 = self.n() * self.n();
        DMatrix::from_fn(n2, self.alg.dim(), |r, c| self.images[c].as_dmatrix().as_slice()[r])
    }

    /// Concatenated `vec(images[0]), vec(images[1]), ...` of length D·N².
    pub fn to_vector(&self) -> Vec<C64> {
        self.images.iter().flat_map(|m| m.vec()).collect()
    }

    pub fn from_vector(alg: &StarAlgebra, v: &[C64]) -> Result<SuperMap> {
        let n2 = alg.n() * alg.n();
        if v.len() != alg.dim() * n2 {
            return shape_err(format!("expected vector of length {}, got {}", alg.dim() * n2, v.len()));
        }
        let images = v.chunks(n2).map(|c| Matrix::from_vec(alg.n(), c)).collect();
        Ok(SuperMap {
            alg: alg.clone(),
            images,
        })
    }

    /// Largest spectral-norm difference between corresponding images.
    pub fn distance(&self, other: &SuperMap) -> Result<f64> {
        self.check_domain(other)?;
        Ok(self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| (a - b).spectral_norm())
            .fold(0.0, f64::max))
    }
}
