//! C[0,2] discretized on a uniform grid, with the multiplication derivation
//! `d(f) = f·h` and a three-branch σ that is arbitrary (through α) on [0, 1/2].
//!
//! The grid has `4m + 1` points so that 1/2 and 1 are grid points and the
//! branch formulas agree exactly where they meet.

use nalgebra::DMatrix;

use crate::algebra::StarAlgebra;
use crate::error::{shape_err, LabError, Result};
use crate::matrix::Matrix;
use crate::sampling;
use crate::supermap::SuperMap;

#[derive(Clone, Debug, PartialEq)]
pub enum AlphaSpec {
    Zero,
    Random {
        seed: u64,
    },
    /// Real matrix acting on the samples at `t ≤ 1/2`.
    Explicit(DMatrix<f64>),
}

#[derive(Clone, Debug)]
pub struct Example26Instance {
    pub grid_n: usize,
    pub grid: Vec<f64>,
    pub h: Vec<f64>,
    pub alpha: DMatrix<f64>,
    pub alg: StarAlgebra,
    pub sigma: SuperMap,
    pub d: SuperMap,
}

/// `h(t) = max(t − 1, 0)`.
fn ramp(t: f64) -> f64 {
    if t <= 1.0 {
        0.0
    } else {
        t - 1.0
    }
}

pub fn build_example26(grid_n: usize, alpha: AlphaSpec) -> Result<Example26Instance> {
    if grid_n < 5 || !(grid_n - 1).is_multiple_of(4) {
        return Err(LabError::InvalidSpec(format!(
            "grid_n must be 4m+1 with m >= 1, got {grid_n}"
        )));
    }
    let m = (grid_n - 1) / 4;
    let low = m + 1;
    let grid: Vec<f64> = (0..grid_n).map(|k| k as f64 / (2 * m) as f64).collect();
    let h: Vec<f64> = grid.iter().map(|&t| ramp(t)).collect();
    let alpha = match alpha {
        AlphaSpec::Zero => DMatrix::zeros(low, low),
        AlphaSpec::Random { seed } => {
            let mut rng = sampling::rng(seed);
            DMatrix::from_fn(low, low, |_, _| sampling::gaussian(&mut rng))
        }
        AlphaSpec::Explicit(a) => {
            if a.shape() != (low, low) {
                return shape_err(format!("alpha must be {low}x{low}, got {}x{}", a.nrows(), a.ncols()));
            }
            if a.iter().any(|v| !v.is_finite()) {
                return Err(LabError::InvalidSpec("alpha entries must be finite".into()));
            }
            a
        }
    };
    let alg = StarAlgebra::new(&vec![1; grid_n])?;
    let (half, one) = (m, 2 * m);

    let sigma_of = |f: &[f64]| -> Vec<f64> {
        let low_f = &alpha * DMatrix::from_column_slice(low, 1, &f[..low]);
        (0..grid_n)
            .map(|k| {
                let t = grid[k];
                if k <= half {
                    low_f[k]
                } else if k <= one {
                    2.0 * (1.0 - t) * low_f[half] + (t - 0.5) * f[one]
                } else {
                    0.5 * f[k]
                }
            })
            .collect()
    };
    let indicator = |k: usize| -> Vec<f64> { (0..grid_n).map(|j| if j == k { 1.0 } else { 0.0 }).collect() };
    let sigma_images = (0..grid_n)
        .map(|k| Matrix::from_real_diagonal(&sigma_of(&indicator(k))))
        .collect();
    let d_images = (0..grid_n)
        .map(|k| {
            let v: Vec<f64> = indicator(k).iter().zip(&h).map(|(f, h)| f * h).collect();
            Matrix::from_real_diagonal(&v)
        })
        .collect();
    Ok(Example26Instance {
        grid_n,
        sigma: SuperMap::from_images(&alg, sigma_images)?,
        d: SuperMap::from_images(&alg, d_images)?,
        grid,
        h,
        alpha,
        alg,
    })
}

impl Example26Instance {
    /// The globally defined alternative `Σ(f) = f/2`.
    pub fn half_map(&self) -> SuperMap {
        SuperMap::identity(&self.alg).scale_real(0.5)
    }

    /// Diagonal indicator of the grid points with `h > 0`, i.e. `t > 1`.
    pub fn support_projection(&self) -> Matrix {
        let diag: Vec<f64> = self.h.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect();
        Matrix::from_real_diagonal(&diag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Tolerances;
    use crate::derivations::leibniz_residual;

    #[test]
    fn five_point_grid() {
        let inst = build_example26(5, AlphaSpec::Zero).unwrap();
        assert_eq!(inst.grid, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(inst.h, vec![0.0, 0.0, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn rejects_bad_grid() {
        for n in [0, 1, 4, 6, 8] {
            assert!(matches!(
                build_example26(n, AlphaSpec::Zero),
                Err(LabError::InvalidSpec(_))
            ));
        }
        assert!(build_example26(9, AlphaSpec::Explicit(DMatrix::zeros(2, 2))).is_err());
    }

    #[test]
    fn leibniz_holds_for_any_alpha() {
        let tol = Tolerances::default();
        for seed in 0..5 {
            let inst = build_example26(9, AlphaSpec::Random { seed }).unwrap();
            let c = leibniz_residual(&inst.d, &inst.sigma, &tol).unwrap();
            assert!(c.residual <= 1e-14 * c.scale, "{}", c.residual);
            assert!(inst.d.is_star_linear(&tol).holds);
        }
    }

    #[test]
    fn branches_meet_at_breakpoints() {
        let alpha = DMatrix::from_fn(3, 3, |i, j| (i as f64 + 1.0) * 0.5 - j as f64);
        let inst = build_example26(9, AlphaSpec::Explicit(alpha.clone())).unwrap();
        // f = indicator of t = 1 (index 4): σ(f)(1) = 1/2 from both boundary formulas
        assert_eq!(inst.sigma.image(4).get(4, 4).re, 0.5);
        // f = indicator of t = 0: σ(f)(t) at t = 3/4 is 2(1/4)·(αf)(1/2)
        assert_eq!(inst.sigma.image(0).get(3, 3).re, 0.5 * alpha[(2, 0)]);
    }
}
