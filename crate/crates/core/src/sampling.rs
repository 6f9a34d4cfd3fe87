//! Seeded random instances: matrices, unitaries, and families of σ that admit
//! nonzero derivations.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::StarAlgebra;
use crate::error::Result;
use crate::matrix::{Matrix, C64};
use crate::supermap::SuperMap;

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as LabRng;

pub fn rng(seed: u64) -> LabRng {
    LabRng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex Gaussian (unit variance).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(n, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let g = random_matrix(n, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let qr = random_matrix(n, rng).into_dmatrix().qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Matrix::wrap(q)
}

/// Block-diagonal unitary lying in the algebra.
pub fn random_block_unitary<R: Rng + ?Sized>(alg: &StarAlgebra, rng: &mut R) -> Matrix {
    let mut out = Matrix::zeros(alg.n()).into_dmatrix();
    let mut off = 0;
    for &b in alg.blocks() {
        let u = random_unitary(b, rng);
        out.view_mut((off, off), (b, b)).copy_from(u.as_dmatrix());
        off += b;
    }
    Matrix::wrap(out)
}

/// Random coefficient vector of an algebra element.
pub fn random_element<R: Rng + ?Sized>(alg: &StarAlgebra, rng: &mut R) -> Vec<C64> {
    (0..alg.dim()).map(|_| complex_gaussian(rng)).collect()
}

pub fn random_linear_map<R: Rng + ?Sized>(alg: &StarAlgebra, rng: &mut R) -> SuperMap {
    let images = (0..alg.dim()).map(|_| random_matrix(alg.n(), rng)).collect();
    SuperMap::from_images(alg, images).expect("shapes match")
}

pub fn random_star_linear_map<R: Rng + ?Sized>(alg: &StarAlgebra, rng: &mut R) -> SuperMap {
    random_linear_map(alg, rng).star_part()
}

/// `A ↦ U A U*`.
pub fn conjugation_map(alg: &StarAlgebra, u: &Matrix) -> Result<SuperMap> {
    let ua = u.adjoint();
    SuperMap::from_fn(alg, |e| &(u * e) * &ua)
}

/// σ(A) = π(A) + (I−P)R(A)(I−P), where π is a *-homomorphism with π(A) = Pπ(A)P.
///
/// The multiplicativity defect of σ lives on range(I−P) while any π-derivation
/// compressed to range(P) is a σ-derivation.
#[derive(Clone, Debug)]
pub struct CompressedSigma {
    pub sigma: SuperMap,
    pub pi: SuperMap,
    pub p: Matrix,
}

#[derive(Clone, Copy, Debug)]
pub struct CompressedOptions {
    /// R is *-linear, making σ *-linear.
    pub star_linear: bool,
    /// Keep every image inside the algebra (block-diagonal unitary, projected R).
    pub block_preserving: bool,
}

pub fn compressed_sigma<R: Rng + ?Sized>(alg: &StarAlgebra, opts: CompressedOptions, rng: &mut R) -> CompressedSigma {
    let n = alg.n();
    let nb = alg.blocks().len();
    // keep a nonempty subset of blocks, proper when possible
    let keep: Vec<bool> = if nb == 1 {
        vec![true]
    } else {
        loop {
            let k: Vec<bool> = (0..nb).map(|_| rng.random_bool(0.5)).collect();
            if k.iter().any(|&b| b) && !k.iter().all(|&b| b) {
                break k;
            }
        }
    };
    let mut diag = Vec::with_capacity(n);
    for (b, &size) in alg.blocks().iter().enumerate() {
        diag.extend(std::iter::repeat_n(if keep[b] { 1.0 } else { 0.0 }, size));
    }
    let central = Matrix::from_real_diagonal(&diag);
    let w = if opts.block_preserving {
        random_block_unitary(alg, rng)
    } else {
        random_unitary(n, rng)
    };
    let wa = w.adjoint();
    let p = &(&w * &central) * &wa;
    let q = &Matrix::identity(n) - &p;
    let pi = SuperMap::from_fn(alg, |e| &(&(&w * e) * &central) * &wa).expect("shapes match");
    let mut r = if opts.star_linear {
        random_star_linear_map(alg, rng)
    } else {
        random_linear_map(alg, rng)
    };
    if opts.block_preserving {
        r = r.map_images(|m| alg.project(m).expect("dims match"));
    }
    let tail = r.map_images(|m| &(&q * m) * &q);
    let sigma = pi.add(&tail).expect("same domain");
    CompressedSigma { sigma, pi, p }
}

impl CompressedSigma {
    /// `A ↦ x π(A) − π(A) x` with `x = i·P H P` for Hermitian H, a *-preserving σ-derivation.
    pub fn star_inner_derivation<R: Rng + ?Sized>(&self, rng: &mut R) -> SuperMap {
        let n = self.p.dim();
        let h = random_hermitian(n, rng);
        let x = (&(&self.p * &h) * &self.p).scale(C64::new(0.0, 1.0));
        self.pi.map_images(|m| &(&x * m) - &(m * &x))
    }

    /// Like [`Self::star_inner_derivation`] but with `x` drawn inside the algebra
    /// and `P` applied on both sides, so images stay in the algebra when π does.
    pub fn star_inner_derivation_in(&self, alg: &StarAlgebra, rng: &mut impl Rng) -> SuperMap {
        let h = alg.embed(&random_element(alg, rng)).expect("length matches");
        let h = (&h + &h.adjoint()).scale_real(0.5);
        let x = (&(&self.p * &h) * &self.p).scale(C64::new(0.0, 1.0));
        self.pi.map_images(|m| &(&x * m) - &(m * &x))
    }
}

/// Families of σ used for randomized trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaFamily {
    /// Unstructured linear map; usually only d = 0.
    Generic,
    /// `A ↦ U A U*`.
    Automorphism,
    /// `A ↦ U A U* / 2`, so the automorphism itself is a derivation.
    HalfAutomorphism,
    /// [`compressed_sigma`] with a generic tail.
    Compressed,
    /// [`compressed_sigma`] with a *-linear tail.
    StarCompressed,
}

impl SigmaFamily {
    pub const ALL: [SigmaFamily; 5] = [
        SigmaFamily::Generic,
        SigmaFamily::Automorphism,
        SigmaFamily::HalfAutomorphism,
        SigmaFamily::Compressed,
        SigmaFamily::StarCompressed,
    ];

    pub fn is_homomorphism(self) -> bool {
        matches!(self, SigmaFamily::Automorphism)
    }
}

pub fn random_sigma<R: Rng + ?Sized>(alg: &StarAlgebra, family: SigmaFamily, rng: &mut R) -> SuperMap {
    match family {
        SigmaFamily::Generic => random_linear_map(alg, rng),
        SigmaFamily::Automorphism => conjugation_map(alg, &random_unitary(alg.n(), rng)).expect("dims match"),
        SigmaFamily::HalfAutomorphism => conjugation_map(alg, &random_unitary(alg.n(), rng))
            .expect("dims match")
            .scale_real(0.5),
        SigmaFamily::Compressed | SigmaFamily::StarCompressed => {
            let opts = CompressedOptions {
                star_linear: family == SigmaFamily::StarCompressed,
                block_preserving: false,
            };
            compressed_sigma(alg, opts, rng).sigma
        }
    }
}
