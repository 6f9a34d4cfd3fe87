//! The algebra 𝔄 ⊕ B(ℂ^N) with the σ-twisted bimodule product
//! `(a, x)(b, y) = (ab, xσ(b) + σ(a)y)`, the embedding `a ↦ (a, d(a))`, and a
//! lower-bound estimator for the associated norm.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{StarAlgebra, Tolerances};
use crate::derivations::leibniz_residual;
use crate::error::{shape_err, LabError, Result};
use crate::linalg;
use crate::matrix::{Matrix, C64};
use crate::par;
use crate::sampling;
use crate::supermap::SuperMap;

#[derive(Clone, Debug, PartialEq)]
pub struct SemidirectElement {
    /// Coordinates in the canonical basis of 𝔄.
    pub a: Vec<C64>,
    pub x: Matrix,
}

impl SemidirectElement {
    pub fn add(&self, other: &SemidirectElement) -> SemidirectElement {
        SemidirectElement {
            a: self.a.iter().zip(&other.a).map(|(p, q)| p + q).collect(),
            x: &self.x + &other.x,
        }
    }

    pub fn scale(&self, c: C64) -> SemidirectElement {
        SemidirectElement {
            a: self.a.iter().map(|z| z * c).collect(),
            x: self.x.scale(c),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SemidirectContext {
    alg: StarAlgebra,
    sigma: SuperMap,
    tol: Tolerances,
}

/// Embedding `a ↦ (a, d(a))` with its homomorphism residual.
#[derive(Clone, Debug)]
pub struct PhiD {
    pub d: SuperMap,
    /// Max over basis pairs of `‖φ(E_iE_j) − φ(E_i)φ(E_j)‖`, component norms summed.
    pub hom_residual: f64,
    /// The first component is the identity, so this is structural.
    pub injective: bool,
    pub passed: bool,
}

/// Iteration budget for [`SemidirectContext::norm_estimate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormBudget {
    /// Independent random starts; start `k` uses RNG stream `k`, so a larger
    /// budget explores a superset of a smaller one.
    pub starts: usize,
    /// Ascent sweeps per start.
    pub iterations: usize,
}

impl Default for NormBudget {
    fn default() -> Self {
        NormBudget {
            starts: 8,
            iterations: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    /// `‖a‖ + max(‖x‖, left, right, both)`.
    pub value: f64,
    pub algebra_norm: f64,
    pub x_norm: f64,
    /// Estimated sup of `‖σ(a₁)x‖`.
    pub left: f64,
    /// Estimated sup of `‖xσ(a₂)‖`.
    pub right: f64,
    /// Estimated sup of `‖σ(a₁)xσ(a₂)‖`.
    pub both: f64,
    /// Every term is attained at a feasible point, so `value` never exceeds the true norm.
    pub lower_bound: bool,
}

impl SemidirectContext {
    /// Fails unless σ is multiplicative.
    pub fn new(sigma: &SuperMap, tol: &Tolerances) -> Result<Self> {
        let hom = sigma.is_homomorphism(tol);
        if !hom.holds {
            return Err(LabError::Precondition {
                what: "sigma is not a homomorphism".into(),
                residual: hom.residual,
            });
        }
        Ok(SemidirectContext {
            alg: sigma.algebra().clone(),
            sigma: sigma.clone(),
            tol: *tol,
        })
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.alg
    }

    pub fn sigma(&self) -> &SuperMap {
        &self.sigma
    }

    pub fn element(&self, a: Vec<C64>, x: Matrix) -> Result<SemidirectElement> {
        let e = SemidirectElement { a, x };
        self.check(&e)?;
        Ok(e)
    }

    fn check(&self, e: &SemidirectElement) -> Result<()> {
        if e.a.len() != self.alg.dim() {
            return shape_err(format!(
                "algebra part has length {}, expected {}",
                e.a.len(),
                self.alg.dim()
            ));
        }
        self.alg.check_dim(&e.x)
    }

    fn algebra_product(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let prod = &self.alg.embed(a).expect("checked") * &self.alg.embed(b).expect("checked");
        self.alg.coeffs_of(&prod).expect("dims match").0
    }

    pub fn mul(&self, u: &SemidirectElement, v: &SemidirectElement) -> Result<SemidirectElement> {
        self.check(u)?;
        self.check(v)?;
        let a = self.algebra_product(&u.a, &v.a);
        let x = &(&u.x * &self.sigma.apply_coeffs(&v.a)) + &(&self.sigma.apply_coeffs(&u.a) * &v.x);
        Ok(SemidirectElement { a, x })
    }

    /// `‖a − b‖ + ‖x − y‖` with spectral norms.
    pub fn distance(&self, u: &SemidirectElement, v: &SemidirectElement) -> f64 {
        let da: Vec<C64> = u.a.iter().zip(&v.a).map(|(p, q)| p - q).collect();
        self.alg.embed(&da).expect("checked").spectral_norm() + (&u.x - &v.x).spectral_norm()
    }

    /// Identity `(1, 0)`.
    pub fn one(&self) -> SemidirectElement {
        SemidirectElement {
            a: self.alg.identity_coeffs(),
            x: Matrix::zeros(self.alg.n()),
        }
    }

    pub fn phi_d(&self, d: &SuperMap) -> Result<PhiD> {
        let check = leibniz_residual(d, &self.sigma, &self.tol)?;
        if !check.passed {
            return Err(LabError::Precondition {
                what: "d is not a sigma-derivation".into(),
                residual: check.residual,
            });
        }
        let dim = self.alg.dim();
        let res = par::map_range(dim * dim, |k| {
            let (i, j) = (k / dim, k % dim);
            let ei = self.embed_phi(d, i);
            let ej = self.embed_phi(d, j);
            let lhs = match self.alg.product_index(i, j) {
                Some(p) => self.embed_phi(d, p),
                None => SemidirectElement {
                    a: vec![C64::new(0.0, 0.0); dim],
                    x: Matrix::zeros(self.alg.n()),
                },
            };
            let rhs = self.mul(&ei, &ej).expect("shapes checked");
            self.distance(&lhs, &rhs)
        });
        let hom_residual = res.into_iter().fold(0.0, f64::max);
        let scale = d.scale().max(self.sigma.scale());
        Ok(PhiD {
            d: d.clone(),
            hom_residual,
            injective: true,
            passed: self.tol.passes(hom_residual, scale),
        })
    }

    fn embed_phi(&self, d: &SuperMap, idx: usize) -> SemidirectElement {
        let mut a = vec![C64::new(0.0, 0.0); self.alg.dim()];
        a[idx] = C64::new(1.0, 0.0);
        SemidirectElement {
            a,
            x: d.image(idx).clone(),
        }
    }

    /// `φ_d(a) = (a, d(a))`.
    pub fn apply_phi(&self, d: &SuperMap, a: &[C64]) -> SemidirectElement {
        SemidirectElement {
            a: a.to_vec(),
            x: d.apply_coeffs(a),
        }
    }

    /// Multi-start alternating ascent for
    /// `‖a‖ + sup{‖x‖, ‖σ(a₁)x‖, ‖xσ(a₂)‖, ‖σ(a₁)xσ(a₂)‖ : ‖a₁‖, ‖a₂‖ ≤ 1}`.
    ///
    /// With the top singular pair `(u, v)` fixed, each objective is linear in
    /// one of `a₁, a₂`, and the linear functional `b ↦ tr(F*b)` is maximized on
    /// the unit ball by the blockwise polar factor of `F`. Every step is a
    /// feasible point, so all reported values are lower bounds.
    pub fn norm_estimate(&self, u: &SemidirectElement, budget: NormBudget, seed: u64) -> Result<NormEstimate> {
        self.check(u)?;
        if budget.starts == 0 || budget.iterations == 0 {
            return Err(LabError::InvalidSpec("norm budget must be positive".into()));
        }
        let algebra_norm = self.alg.embed(&u.a)?.spectral_norm();
        let x_norm = u.x.spectral_norm();
        let runs = par::map_range(budget.starts, |start| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(start as u64);
            self.ascend(&u.x, budget.iterations, &mut rng)
        });
        let (left, right, both) = runs.into_iter().fold((0.0f64, 0.0f64, 0.0f64), |acc, r| {
            (acc.0.max(r.0), acc.1.max(r.1), acc.2.max(r.2))
        });
        let sup = x_norm.max(left).max(right).max(both);
        Ok(NormEstimate {
            value: algebra_norm + sup,
            algebra_norm,
            x_norm,
            left,
            right,
            both,
            lower_bound: true,
        })
    }

    fn ascend(&self, x: &Matrix, iterations: usize, rng: &mut impl Rng) -> (f64, f64, f64) {
        let a1 = self.random_unit(rng);
        let a2 = self.random_unit(rng);
        let left = self.ascend_one(x, a1.clone(), None, iterations);
        let right = self.ascend_one(x, None, a2.clone(), iterations);
        let both = self.ascend_one(x, a1, a2, iterations);
        (left, right, both)
    }

    fn random_unit(&self, rng: &mut impl Rng) -> Option<Matrix> {
        let m = self
            .alg
            .embed(&sampling::random_element(&self.alg, rng))
            .expect("length matches");
        let norm = m.spectral_norm();
        (norm > 0.0).then(|| m.scale_real(1.0 / norm))
    }

    /// Ascent on `‖σ(a₁) x σ(a₂)‖` where an absent side is the identity factor.
    fn ascend_one(&self, x: &Matrix, mut a1: Option<Matrix>, mut a2: Option<Matrix>, iterations: usize) -> f64 {
        let n = self.alg.n();
        let left = |a: &Option<Matrix>| {
            a.as_ref()
                .map(|m| self.sigma.apply(m).expect("dims"))
                .unwrap_or_else(|| Matrix::identity(n))
        };
        let value = |a1: &Option<Matrix>, a2: &Option<Matrix>| {
            let m = &(&left(a1) * x) * &left(a2);
            let feasible = |a: &Option<Matrix>| a.as_ref().map(|m| m.spectral_norm().max(1.0)).unwrap_or(1.0);
            m.spectral_norm() / (feasible(a1) * feasible(a2))
        };
        let mut best = value(&a1, &a2);
        for _ in 0..iterations {
            let prev = best;
            if a1.is_some() {
                let (s1, s2) = (left(&a1), left(&a2));
                let (uvec, vvec) = top_singular_pair(&(&(&s1 * x) * &s2));
                // f(b) = u* σ(b) w
                let w = (x * &s2).into_dmatrix() * vvec;
                a1 = Some(self.maximize_functional(|img| (uvec.adjoint() * img.as_dmatrix() * &w)[(0, 0)]));
                best = best.max(value(&a1, &a2));
            }
            if a2.is_some() {
                let (s1, s2) = (left(&a1), left(&a2));
                let (uvec, vvec) = top_singular_pair(&(&(&s1 * x) * &s2));
                // f(b) = (u* σ(a₁) x) σ(b) v
                let row = uvec.adjoint() * (&s1 * x).as_dmatrix();
                a2 = Some(self.maximize_functional(|img| (&row * img.as_dmatrix() * &vvec)[(0, 0)]));
                best = best.max(value(&a1, &a2));
            }
            if best <= prev * (1.0 + 1e-15) && best > 0.0 {
                break;
            }
        }
        best
    }

    /// Unit-ball maximizer of `|Σ_i b_i g_i|` with `g_i = f(σ(E_i))`: the
    /// blockwise polar factor of `F = Σ conj(g_i) E_i`.
    fn maximize_functional(&self, f: impl Fn(&Matrix) -> C64) -> Matrix {
        let alg = &self.alg;
        let g: Vec<C64> = self.sigma.images().iter().map(&f).collect();
        let conj: Vec<C64> = g.iter().map(|z| z.conj()).collect();
        let big_f = alg.embed(&conj).expect("length matches").into_dmatrix();
        let mut out = DMatrix::<C64>::zeros(alg.n(), alg.n());
        let mut off = 0;
        for &b in alg.blocks() {
            let block = big_f.view((off, off), (b, b)).into_owned();
            if block.iter().any(|z| z.norm() > 0.0) {
                out.view_mut((off, off), (b, b))
                    .copy_from(&linalg::polar_factor(&block));
            }
            off += b;
        }
        Matrix::wrap(out)
    }
}

/// Left and right singular vectors of the largest singular value.
fn top_singular_pair(m: &Matrix) -> (DMatrix<C64>, DMatrix<C64>) {
    let svd = m.as_dmatrix().clone().svd(true, true);
    let (u, v_t) = (svd.u.expect("U"), svd.v_t.expect("V*"));
    let k = svd.singular_values.imax();
    (
        DMatrix::from_column_slice(u.nrows(), 1, u.column(k).as_slice()),
        DMatrix::from_iterator(v_t.ncols(), 1, v_t.row(k).iter().map(|z| z.conj())),
    )
}
