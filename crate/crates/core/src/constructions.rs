//! Projection constructions that replace σ by a better-behaved map.
//!
//! Every "closed linear span over 𝔄" or "intersection over 𝔄" is taken over the
//! basis units only; linearity makes that exhaustive.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::algebra::{StarAlgebra, Tolerances};
use crate::derivations::{dstar, leibniz_residual};
use crate::error::{LabError, Result};
use crate::linalg;
use crate::matrix::{Matrix, C64};
use crate::par;
use crate::supermap::SuperMap;

/// Output of one construction: the projection, the replacement map(s) and
/// every residual the construction is supposed to drive to zero.
#[derive(Clone, Debug)]
pub struct ConstructionReport {
    pub p: Matrix,
    pub sigma: SuperMap,
    pub dmap: Option<SuperMap>,
    pub residuals: BTreeMap<String, f64>,
    /// Singular values of the stacked generator matrix behind `p`.
    pub singular_values: Vec<f64>,
    pub passed: bool,
    pub scale: f64,
}

impl ConstructionReport {
    fn finish(
        p: Matrix,
        sigma: SuperMap,
        dmap: Option<SuperMap>,
        mut residuals: BTreeMap<String, f64>,
        singular_values: Vec<f64>,
        scale: f64,
        tol: &Tolerances,
    ) -> Self {
        residuals.insert("projection_idempotent".into(), (&(&p * &p) - &p).spectral_norm());
        residuals.insert("projection_selfadjoint".into(), (&p - &p.adjoint()).spectral_norm());
        let passed = residuals.values().all(|&r| tol.passes(r, scale));
        ConstructionReport {
            p,
            sigma,
            dmap,
            residuals,
            singular_values,
            passed,
            scale,
        }
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.get(name).copied()
    }

    /// Records the Leibniz residual of `d` against a caller-supplied Σ under
    /// `leibniz_candidate`. Informational: it does not affect `passed`.
    pub fn check_candidate(&mut self, d: &SuperMap, candidate: &SuperMap, tol: &Tolerances) -> Result<f64> {
        let r = leibniz_residual(d, candidate, tol)?.residual;
        self.residuals.insert("leibniz_candidate".into(), r);
        Ok(r)
    }
}

/// Horizontal stack `[m_0 | m_1 | ...]` (N × N·k).
fn hstack(n: usize, mats: &[&Matrix]) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(n, n * mats.len());
    for (k, m) in mats.iter().enumerate() {
        out.columns_mut(k * n, n).copy_from(m.as_dmatrix());
    }
    out
}

/// Orthogonal projection onto the joint column span of `mats` in ℂ^n, with the
/// singular values used for the rank decision.
pub fn range_span_projection(n: usize, mats: &[Matrix], tol: &Tolerances) -> Result<(Matrix, Vec<f64>)> {
    range_span_projection_above(n, mats, tol, 0.0)
}

fn range_span_projection_above(
    n: usize,
    mats: &[Matrix],
    tol: &Tolerances,
    reference: f64,
) -> Result<(Matrix, Vec<f64>)> {
    if let Some(m) = mats.iter().find(|m| m.dim() != n) {
        return Err(LabError::Shape(format!("generator has dim {}, expected {n}", m.dim())));
    }
    let refs: Vec<&Matrix> = mats.iter().collect();
    let (q, sv) = linalg::range_basis_above(&hstack(n, &refs), tol, reference);
    Ok((linalg::projector(&q), sv))
}

/// Distance between range(I − P) and the common kernel of `ops`, which is the
/// orthogonal complement of the joint range of their adjoints.
fn kernel_identity(n: usize, p: &Matrix, ops: &[&Matrix], tol: &Tolerances, reference: f64) -> f64 {
    let k_basis = linalg::projection_range(&(&Matrix::identity(n) - p));
    let adjoints: Vec<Matrix> = ops.iter().map(|m| m.adjoint()).collect();
    let refs: Vec<&Matrix> = adjoints.iter().collect();
    let (q, _) = linalg::range_basis_above(&hstack(n, &refs), tol, reference);
    let common_kernel = linalg::projection_range(&(&Matrix::identity(n) - &linalg::projector(&q)));
    linalg::subspace_distance(&k_basis, &common_kernel)
}

fn require(cond: bool, what: &str, residual: f64) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(LabError::Precondition {
            what: what.into(),
            residual,
        })
    }
}

fn require_derivation(d: &SuperMap, sigma: &SuperMap, tol: &Tolerances) -> Result<()> {
    let c = leibniz_residual(d, sigma, tol)?;
    require(c.passed, "d is not a sigma-derivation", c.residual)
}

/// Σ(A) = σ(A)P with P the range projection of d, for a *-preserving σ-derivation d.
pub fn construct_sigma_thm32(d: &SuperMap, sigma: &SuperMap, tol: &Tolerances) -> Result<ConstructionReport> {
    require_derivation(d, sigma, tol)?;
    let star = d.is_star_linear(tol);
    require(star.holds, "d does not preserve *", star.residual)?;
    let n = d.n();
    let (p, sv) = range_span_projection(n, d.images(), tol)?;
    let big_sigma = sigma.right_compress(&p)?;
    let mut res = BTreeMap::new();
    res.insert("leibniz".into(), leibniz_residual(d, &big_sigma, tol)?.residual);
    let ops: Vec<&Matrix> = d.images().iter().collect();
    res.insert("kernel_identity".into(), kernel_identity(n, &p, &ops, tol, 0.0));
    let scale = d.scale().max(sigma.scale());
    Ok(ConstructionReport::finish(p, big_sigma, None, res, sv, scale, tol))
}

/// Same recipe with the range of d and d* combined; needs only *-linear σ.
pub fn construct_sigma_thm33(d: &SuperMap, sigma: &SuperMap, tol: &Tolerances) -> Result<ConstructionReport> {
    let star = sigma.is_star_linear(tol);
    require(star.holds, "sigma is not *-linear", star.residual)?;
    require_derivation(d, sigma, tol)?;
    let n = d.n();
    let ds = dstar(d);
    let gens: Vec<Matrix> = d.images().iter().chain(ds.images()).cloned().collect();
    let (p, sv) = range_span_projection(n, &gens, tol)?;
    let big_sigma = sigma.right_compress(&p)?;
    let mut res = BTreeMap::new();
    res.insert("leibniz".into(), leibniz_residual(d, &big_sigma, tol)?.residual);
    res.insert("leibniz_dstar".into(), leibniz_residual(&ds, &big_sigma, tol)?.residual);
    let ops: Vec<&Matrix> = gens.iter().collect();
    res.insert("kernel_identity".into(), kernel_identity(n, &p, &ops, tol, 0.0));
    let scale = d.scale().max(sigma.scale());
    Ok(ConstructionReport::finish(p, big_sigma, None, res, sv, scale, tol))
}

fn max_commutator(maps: &SuperMap, p: &Matrix) -> f64 {
    maps.images()
        .iter()
        .map(|m| (&(m * p) - &(p * m)).spectral_norm())
        .fold(0.0, f64::max)
}

/// Compresses a *-linear σ and a σ-derivation d to the common kernel of all
/// multiplicativity defects, yielding a *-homomorphism Σ and a Σ-derivation D.
pub fn reduce_to_hom_prop34(d: &SuperMap, sigma: &SuperMap, tol: &Tolerances) -> Result<ConstructionReport> {
    let star = sigma.is_star_linear(tol);
    require(star.holds, "sigma is not *-linear", star.residual)?;
    require_derivation(d, sigma, tol)?;
    let n = d.n();
    let dim = sigma.algebra().dim();
    let defects = par::map_range(dim * dim, |k| sigma.defect(k / dim, k % dim));
    // defects of an exact homomorphism are rounding noise of size ‖σ‖²·ε
    let reference = sigma
        .images()
        .iter()
        .map(Matrix::spectral_norm)
        .fold(0.0, f64::max)
        .powi(2);
    let (defect_proj, sv) = range_span_projection_above(n, &defects, tol, reference)?;
    let p = &Matrix::identity(n) - &defect_proj;
    let big_sigma = sigma.right_compress(&p)?;
    let dmap = d.right_compress(&p)?;

    let mut res = BTreeMap::new();
    res.insert("homomorphism".into(), big_sigma.is_homomorphism(tol).residual);
    res.insert("star".into(), big_sigma.is_star_linear(tol).residual);
    res.insert("leibniz".into(), leibniz_residual(&dmap, &big_sigma, tol)?.residual);
    res.insert("commutation_sigma".into(), max_commutator(sigma, &p));
    res.insert("commutation_d".into(), max_commutator(d, &p));
    let defect_refs: Vec<&Matrix> = defects.iter().collect();
    res.insert(
        "kernel_identity".into(),
        kernel_identity(n, &defect_proj, &defect_refs, tol, reference),
    );
    if d.is_star_linear(tol).holds {
        res.insert("star_d".into(), dmap.is_star_linear(tol).residual);
    }
    let scale = d.scale().max(sigma.scale());
    Ok(ConstructionReport::finish(
        p,
        big_sigma,
        Some(dmap),
        res,
        sv,
        scale,
        tol,
    ))
}

/// For a *-preserving σ-derivation with arbitrary σ: d is also a σ*- and a
/// (σ+σ*)/2-derivation, and the latter feeds [`reduce_to_hom_prop34`].
pub fn reduce_general_prop36(d: &SuperMap, sigma: &SuperMap, tol: &Tolerances) -> Result<ConstructionReport> {
    let star = d.is_star_linear(tol);
    require(star.holds, "d does not preserve *", star.residual)?;
    require_derivation(d, sigma, tol)?;
    let sigma_star = sigma.star_conjugate();
    let tau = sigma.star_part();
    let against_star = leibniz_residual(d, &sigma_star, tol)?.residual;
    let against_tau = leibniz_residual(d, &tau, tol)?.residual;
    let mut report = reduce_to_hom_prop34(d, &tau, tol)?;
    report.residuals.insert("leibniz_sigma_star".into(), against_star);
    report.residuals.insert("leibniz_tau".into(), against_tau);
    report.scale = report.scale.max(sigma.scale());
    report.passed = report.residuals.values().all(|&r| tol.passes(r, report.scale));
    Ok(report)
}

/// Whether the reduction projection lies in the algebra when σ and d map into it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Membership {
    /// σ or d leaves the algebra; the claim says nothing.
    HypothesisNotMet {
        residual: f64,
    },
    Holds {
        residual: f64,
    },
    Violated {
        residual: f64,
    },
}

impl Membership {
    pub fn holds(&self) -> bool {
        matches!(self, Membership::Holds { .. })
    }
}

pub fn projection_membership_rem35(
    alg: &StarAlgebra,
    report: &ConstructionReport,
    sigma: &SuperMap,
    d: &SuperMap,
    tol: &Tolerances,
) -> Result<Membership> {
    let mut hyp = 0.0f64;
    let mut inside = true;
    for m in sigma.images().iter().chain(d.images()) {
        let r = alg.membership_residual(m)?;
        hyp = hyp.max(r);
        inside &= alg.contains(m, tol)?;
    }
    if !inside {
        return Ok(Membership::HypothesisNotMet { residual: hyp });
    }
    let residual = alg.membership_residual(&report.p)?;
    Ok(if alg.contains(&report.p, tol)? {
        Membership::Holds { residual }
    } else {
        Membership::Violated { residual }
    })
}
