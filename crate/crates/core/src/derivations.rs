//! σ- and (σ,τ)-derivations: Leibniz residuals, the derivation-space solver,
//! the multiplicativity-defect identity, annihilators and symmetrization.
//!
//! All bilinear (trilinear) identities are evaluated on every pair (triple) of
//! basis units, which certifies them on the whole algebra.
//!
//! The separating space of a linear map is always `{0}` in finite dimensions,
//! so nothing here models it.

use nalgebra::DMatrix;

use crate::algebra::{StarAlgebra, Tolerances};
use crate::error::{shape_err, LabError, Result};
use crate::linalg::{self, NullSpace};
use crate::matrix::{Matrix, C64, ONE};
use crate::par;
use crate::supermap::{Predicate, SuperMap};

/// Result of checking an identity over all basis pairs or triples.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationCheck {
    pub residual: f64,
    pub passed: bool,
    /// Basis indices attaining the residual: `[a, b]` for pairs, `[a, b, c]` for triples.
    pub worst: Vec<usize>,
    pub scale: f64,
}

impl DerivationCheck {
    fn from_residuals(res: &[f64], decode: impl Fn(usize) -> Vec<usize>, scale: f64, tol: &Tolerances) -> Self {
        let (idx, residual) = par::argmax(res);
        DerivationCheck {
            residual,
            passed: tol.passes(residual, scale),
            worst: decode(idx),
            scale,
        }
    }
}

fn same_domain(maps: &[&SuperMap]) -> Result<()> {
    let first = maps[0].algebra();
    for m in &maps[1..] {
        if m.algebra() != first {
            return shape_err(format!(
                "domain mismatch: blocks {:?} vs {:?}",
                first.blocks(),
                m.algebra().blocks()
            ));
        }
    }
    Ok(())
}

/// `max ‖d(E_iE_j) − d(E_i)σ(E_j) − σ(E_i)d(E_j)‖`.
pub fn leibniz_residual(d: &SuperMap, sigma: &SuperMap, tol: &Tolerances) -> Result<DerivationCheck> {
    sigma_tau_residual(d, sigma, sigma, tol)
}

/// `max ‖d(E_iE_j) − d(E_i)σ(E_j) − τ(E_i)d(E_j)‖`.
pub fn sigma_tau_residual(d: &SuperMap, sigma: &SuperMap, tau: &SuperMap, tol: &Tolerances) -> Result<DerivationCheck> {
    same_domain(&[d, sigma, tau])?;
    let dim = d.algebra().dim();
    let res = par::map_range(dim * dim, |k| {
        let (i, j) = (k / dim, k % dim);
        let lhs = d.image_of_product(i, j);
        let rhs = &(d.image(i) * sigma.image(j)) + &(tau.image(i) * d.image(j));
        (&lhs - &rhs).spectral_norm()
    });
    let scale = d.scale().max(sigma.scale()).max(tau.scale());
    Ok(DerivationCheck::from_residuals(
        &res,
        |k| vec![k / dim, k % dim],
        scale,
        tol,
    ))
}

/// `d(c)(σ(ab) − σ(a)σ(b)) = (σ(ca) − σ(c)σ(a))d(b)` on all basis triples.
pub fn lemma22_residual(d: &SuperMap, sigma: &SuperMap, tol: &Tolerances) -> Result<DerivationCheck> {
    same_domain(&[d, sigma])?;
    let dim = d.algebra().dim();
    let defects = par::map_range(dim * dim, |k| sigma.defect(k / dim, k % dim));
    let res = par::map_range(dim * dim * dim, |t| {
        let (a, b, c) = (t / (dim * dim), (t / dim) % dim, t % dim);
        let lhs = d.image(c) * &defects[a * dim + b];
        let rhs = &defects[c * dim + a] * d.image(b);
        (&lhs - &rhs).spectral_norm()
    });
    let scale = d.scale().max(sigma.scale());
    Ok(DerivationCheck::from_residuals(
        &res,
        |t| vec![t / (dim * dim), (t / dim) % dim, t % dim],
        scale,
        tol,
    ))
}

/// `d*(A) = d(A*)*`.
pub fn dstar(d: &SuperMap) -> SuperMap {
    d.star_conjugate()
}

/// Inner (σ,τ)-derivation together with the homomorphism checks it relies on.
#[derive(Clone, Debug)]
pub struct InnerDerivation {
    pub map: SuperMap,
    pub sigma_hom: Predicate,
    pub tau_hom: Predicate,
}

/// `a ↦ x·σ(a) − τ(a)·x`. A (σ,τ)-derivation whenever σ and τ are
/// homomorphisms; that is reported, not enforced.
pub fn inner_derivation(sigma: &SuperMap, tau: &SuperMap, x: &Matrix, tol: &Tolerances) -> Result<InnerDerivation> {
    same_domain(&[sigma, tau])?;
    sigma.algebra().check_dim(x)?;
    let images = (0..sigma.algebra().dim())
        .map(|i| &(x * sigma.image(i)) - &(tau.image(i) * x))
        .collect();
    Ok(InnerDerivation {
        map: SuperMap::from_images(sigma.algebra(), images)?,
        sigma_hom: sigma.is_homomorphism(tol),
        tau_hom: tau.is_homomorphism(tol),
    })
}

/// Basis of a solution space of the Leibniz system plus its rank audit.
#[derive(Clone, Debug)]
pub struct DerivationSpace {
    /// Orthonormal under `Re tr(d*d')` summed over basis images (complex
    /// orthonormal when unconstrained).
    pub basis: Vec<SuperMap>,
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    pub star_constrained: bool,
}

impl DerivationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Real-linear combination `Σ w_k basis[k]`.
    pub fn combine(&self, alg: &StarAlgebra, weights: &[f64]) -> SuperMap {
        weights
            .iter()
            .zip(&self.basis)
            .fold(SuperMap::zero(alg), |acc, (w, b)| {
                acc.add(&b.scale_real(*w)).expect("same domain")
            })
    }
}

/// Dense Leibniz operator `d ↦ [d(E_iE_j) − d(E_i)σ(E_j) − τ(E_i)d(E_j)]_{i,j}`.
///
/// Unknowns are `vec(d(E_k))` stacked in basis order, column-major inside each
/// image: entry `(p, q)` of `d(E_k)` is column `k·N² + q·N + p`. Row
/// `(i·D + j)·N² + q·N + p` is entry `(p, q)` of the `(i, j)` equation.
pub fn leibniz_operator(sigma: &SuperMap, tau: &SuperMap) -> Result<DMatrix<C64>> {
    same_domain(&[sigma, tau])?;
    let alg = sigma.algebra();
    let (dim, n) = (alg.dim(), alg.n());
    let n2 = n * n;
    let col = |k: usize, p: usize, q: usize| k * n2 + q * n + p;
    let blocks = par::map_range(dim * dim, |pair| {
        let (i, j) = (pair / dim, pair % dim);
        let (s_j, t_i) = (sigma.image(j), tau.image(i));
        let prod = alg.product_index(i, j);
        let mut block = DMatrix::<C64>::zeros(n2, dim * n2);
        for q in 0..n {
            for p in 0..n {
                let r = q * n + p;
                if let Some(k) = prod {
                    block[(r, col(k, p, q))] += ONE;
                }
                for s in 0..n {
                    block[(r, col(i, p, s))] -= s_j.get(s, q);
                    block[(r, col(j, s, q))] -= t_i.get(p, s);
                }
            }
        }
        block
    });
    let mut a = DMatrix::<C64>::zeros(dim * dim * n2, dim * n2);
    for (pair, block) in blocks.into_iter().enumerate() {
        a.rows_mut(pair * n2, n2).copy_from(&block);
    }
    Ok(a)
}

/// All σ-derivations `d : 𝔄 → B(ℂ^N)`, optionally restricted to *-preserving ones.
pub fn derivation_space(sigma: &SuperMap, star_constrained: bool, tol: &Tolerances) -> Result<DerivationSpace> {
    sigma_tau_derivation_space(sigma, sigma, star_constrained, tol)
}

/// All (σ,τ)-derivations, optionally restricted to *-preserving ones.
///
/// The *-condition is only real-linear, so the constrained space is found by
/// solving `x = J x` over ℝ inside the complex solution space, where `J` is the
/// conjugate-linear involution `d ↦ d*`.
pub fn sigma_tau_derivation_space(
    sigma: &SuperMap,
    tau: &SuperMap,
    star_constrained: bool,
    tol: &Tolerances,
) -> Result<DerivationSpace> {
    let alg = sigma.algebra().clone();
    let a = leibniz_operator(sigma, tau)?;
    let ns = linalg::nullspace(&a, tol);
    if !star_constrained {
        let basis = columns_to_maps(&alg, &ns.basis)?;
        return Ok(DerivationSpace {
            basis,
            singular_values: ns.singular_values,
            threshold: ns.threshold,
            star_constrained,
        });
    }
    let real = star_fixed_points(&alg, &ns, tol);
    let basis = columns_to_maps(&alg, &real)?;
    Ok(DerivationSpace {
        basis,
        singular_values: ns.singular_values,
        threshold: ns.threshold,
        star_constrained,
    })
}

fn columns_to_maps(alg: &StarAlgebra, cols: &DMatrix<C64>) -> Result<Vec<SuperMap>> {
    cols.column_iter()
        .map(|c| SuperMap::from_vector(alg, c.as_slice()))
        .collect()
}

/// Index of the unknown that `J` reads (conjugated) to produce unknown `u`.
fn star_partner(alg: &StarAlgebra, u: usize) -> usize {
    let n = alg.n();
    let n2 = n * n;
    let (k, rem) = (u / n2, u % n2);
    let (q, p) = (rem / n, rem % n);
    // (d*)(E_k)[p,q] = conj(d(E_k*)[q,p])
    alg.adjoint_index(k) * n2 + p * n + q
}

/// Real-orthonormal basis of `{W c : J(W c) = W c}` for the orthonormal columns `W`.
fn star_fixed_points(alg: &StarAlgebra, ns: &NullSpace<C64>, tol: &Tolerances) -> DMatrix<C64> {
    let w = &ns.basis;
    let (n, k) = w.shape();
    if k == 0 {
        return DMatrix::zeros(n, 0);
    }
    let jw = DMatrix::from_fn(n, k, |r, c| w[(star_partner(alg, r), c)].conj());
    // W(a + ib) − J W (a − ib) = 0, split into real and imaginary rows.
    let mut sys = DMatrix::<f64>::zeros(2 * n, 2 * k);
    for r in 0..n {
        for c in 0..k {
            let diff = w[(r, c)] - jw[(r, c)];
            let sum = w[(r, c)] + jw[(r, c)];
            sys[(r, c)] = diff.re;
            sys[(r, k + c)] = -sum.im;
            sys[(n + r, c)] = diff.im;
            sys[(n + r, k + c)] = sum.re;
        }
    }
    let real_ns = linalg::nullspace(&sys, tol);
    let coeffs = DMatrix::from_fn(k, real_ns.dim(), |r, c| {
        C64::new(real_ns.basis[(r, c)], real_ns.basis[(k + r, c)])
    });
    w * coeffs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnnihilatorSide {
    Right,
    Left,
    Both,
}

/// Orthonormal basis of `ran(E) = {X : eX = 0}`, `lan(E) = {X : Xe = 0}` or
/// their intersection, inside B(ℂ^n).
pub fn annihilators(n: usize, set: &[Matrix], side: AnnihilatorSide, tol: &Tolerances) -> Result<Vec<Matrix>> {
    if n == 0 {
        return Err(LabError::InvalidSpec("dimension must be positive".into()));
    }
    if let Some(bad) = set.iter().find(|e| e.dim() != n) {
        return shape_err(format!("annihilator set element has dim {}, expected {n}", bad.dim()));
    }
    let n2 = n * n;
    let sides: &[AnnihilatorSide] = match side {
        AnnihilatorSide::Both => &[AnnihilatorSide::Right, AnnihilatorSide::Left],
        AnnihilatorSide::Right => &[AnnihilatorSide::Right],
        AnnihilatorSide::Left => &[AnnihilatorSide::Left],
    };
    let mut a = DMatrix::<C64>::zeros(set.len() * sides.len() * n2, n2);
    let mut base = 0;
    for s in sides {
        for e in set {
            for q in 0..n {
                for p in 0..n {
                    let r = base + q * n + p;
                    for t in 0..n {
                        match s {
                            // (eX)[p,q] = Σ_t e[p,t] X[t,q]
                            AnnihilatorSide::Right => a[(r, q * n + t)] += e.get(p, t),
                            // (Xe)[p,q] = Σ_t X[p,t] e[t,q]
                            _ => a[(r, t * n + p)] += e.get(t, q),
                        }
                    }
                }
            }
            base += n2;
        }
    }
    let basis = if set.is_empty() {
        DMatrix::identity(n2, n2)
    } else {
        linalg::nullspace(&a, tol).basis
    };
    Ok(basis.column_iter().map(|c| Matrix::from_vec(n, c.as_slice())).collect())
}

#[derive(Clone, Debug)]
pub struct SymmetrizeReport {
    /// (σ,τ) rule.
    pub forward: DerivationCheck,
    /// (τ,σ) rule.
    pub swapped: DerivationCheck,
    /// Leibniz rule against `(σ+τ)/2`.
    pub mid: DerivationCheck,
}

impl SymmetrizeReport {
    pub fn passed(&self) -> bool {
        self.forward.passed && self.swapped.passed && self.mid.passed
    }
}

/// Returns `(σ+τ)/2` and the three residuals for a *(σ,τ)-derivation `d`.
pub fn symmetrize(
    d: &SuperMap,
    sigma: &SuperMap,
    tau: &SuperMap,
    tol: &Tolerances,
) -> Result<(SuperMap, SymmetrizeReport)> {
    same_domain(&[d, sigma, tau])?;
    for (name, m) in [("sigma", sigma), ("tau", tau), ("d", d)] {
        let p = m.is_star_linear(tol);
        if !p.holds {
            return Err(LabError::Precondition {
                what: format!("{name} is not *-linear"),
                residual: p.residual,
            });
        }
    }
    let mid = sigma.add(tau)?.scale_real(0.5);
    let report = SymmetrizeReport {
        forward: sigma_tau_residual(d, sigma, tau, tol)?,
        swapped: sigma_tau_residual(d, tau, sigma, tol)?,
        mid: leibniz_residual(d, &mid, tol)?,
    };
    Ok((mid, report))
}
