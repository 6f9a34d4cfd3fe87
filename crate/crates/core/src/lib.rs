//! Finite-dimensional laboratory for σ-derivations on C*-algebras.
//!
//! A C*-algebra is modelled as a block-diagonal subalgebra ⊕ M_{n_i}(ℂ) of
//! B(ℂ^N); linear maps into B(ℂ^N) are stored by their images on the matrix
//! units. On top of that sit Leibniz-rule checks, a solver for the full
//! space of (σ,τ)-derivations, the range-projection constructions that
//! replace σ by a continuous map or a *-homomorphism, the (σ,τ)
//! symmetrization, and the semidirect-product embedding.
//!
//! Residual sweeps over basis pairs and triples, solver assembly, and the
//! norm estimator's random starts run on rayon when the `parallel` feature is
//! enabled (the default).

pub mod algebra;
pub mod cli;
pub mod constructions;
pub mod derivations;
pub mod error;
pub mod example26;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod par;
pub mod sampling;
pub mod semidirect;
pub mod supermap;

pub use algebra::{StarAlgebra, Tolerances};
pub use constructions::{
    construct_sigma_thm32, construct_sigma_thm33, projection_membership_rem35, range_span_projection,
    reduce_general_prop36, reduce_to_hom_prop34, ConstructionReport, Membership,
};
pub use derivations::{
    annihilators, derivation_space, dstar, inner_derivation, leibniz_residual, lemma22_residual,
    sigma_tau_derivation_space, sigma_tau_residual, symmetrize, AnnihilatorSide, DerivationCheck, DerivationSpace,
};
pub use error::{LabError, Result};
pub use example26::{build_example26, AlphaSpec, Example26Instance};
pub use matrix::{Matrix, C64};
pub use semidirect::{NormBudget, NormEstimate, SemidirectContext, SemidirectElement};
pub use supermap::{Predicate, SuperMap};
