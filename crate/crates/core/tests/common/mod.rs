//! Brute-force oracles shared by the integration tests. They avoid the
//! library's SVD path on purpose: Gaussian elimination and Gram-Schmidt only.
#![allow(dead_code)]

use num_complex::Complex64 as C64;

/// Column vectors in ℂ^m.
pub type Vectors = Vec<Vec<C64>>;

/// Nullspace of the row-major `rows × cols` matrix by reduced row echelon
/// form with partial pivoting; pivots below `eps · max|entry|` count as zero.
pub fn rref_nullspace(a: &[Vec<C64>], cols: usize, eps: f64) -> Vectors {
    let mut m: Vec<Vec<C64>> = a.to_vec();
    let scale = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let cut = eps * scale.max(f64::MIN_POSITIVE);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == m.len() {
            break;
        }
        let (best, mag) = (row..m.len())
            .map(|r| (r, m[r][col].norm()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= cut {
            continue;
        }
        m.swap(row, best);
        let p = m[row][col];
        for v in m[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            let f = other[col];
            if r != row && f.norm() > 0.0 {
                for (v, t) in other.iter_mut().zip(&pivot_row) {
                    *v -= f * t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![C64::new(0.0, 0.0); cols];
            v[f] = C64::new(1.0, 0.0);
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f];
            }
            v
        })
        .collect()
}

/// Modified Gram-Schmidt; drops vectors whose remainder is below `eps`
/// relative to their original length.
pub fn gram_schmidt(vs: &[Vec<C64>], eps: f64) -> Vectors {
    let mut out: Vectors = Vec::new();
    for v in vs {
        let len0 = norm(v);
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let len = norm(&w);
        if len > eps * len0.max(f64::MIN_POSITIVE) && len > 0.0 {
            out.push(w.into_iter().map(|z| z / len).collect());
        }
    }
    out
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Upper bound on the largest principal angle between the spans of two
/// orthonormal families: `√k` times the largest residual left after projecting
/// a vector of one family onto the other span.
pub fn principal_angle(q1: &Vectors, q2: &Vectors) -> f64 {
    if q1.len() != q2.len() {
        return std::f64::consts::FRAC_PI_2;
    }
    let one_way = |a: &Vectors, b: &Vectors| {
        let mut worst = 0.0f64;
        for v in b {
            let mut w = v.clone();
            for q in a {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
            worst = worst.max(norm(&w));
        }
        worst
    };
    let s = one_way(q1, q2).max(one_way(q2, q1)) * (q1.len().max(1) as f64).sqrt();
    s.min(1.0).asin()
}
