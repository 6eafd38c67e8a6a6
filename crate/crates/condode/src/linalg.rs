//! Thin helpers over nalgebra's dense complex matrices.

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Row-major real entries into a complex matrix.
pub fn cmat_from_real(rows: usize, cols: usize, data: &[f64]) -> CMat {
    CMat::from_row_iterator(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)))
}

pub fn cvec_from_real(data: &[f64]) -> CVec {
    CVec::from_iterator(data.len(), data.iter().map(|&x| C64::new(x, 0.0)))
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Max row sum of moduli.
pub fn norm_inf_mat(m: &CMat) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Max column sum of moduli.
pub fn norm_one_mat(m: &CMat) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// 2-norm condition number; infinite for singular input.
pub fn cond2(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone()
        .lu()
        .try_inverse()
        .ok_or(Error::SingularBasis { cond: f64::INFINITY })
}

pub fn is_real_mat(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn max_abs_im(m: &CMat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

pub fn real_part(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.im)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

/// Orthonormal basis (columns) of the span of the given columns, dropping
/// directions whose singular value falls below `rel` times the largest.
pub fn orthonormal_basis(m: &CMat, rel: f64) -> CMat {
    if m.ncols() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..s.len()).filter(|&k| s[k] > rel * smax && s[k] > 0.0).collect();
    CMat::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Eigenvalues and unit eigenvectors of a matrix with distinct eigenvalues,
/// from the complex Schur form `A = Q T Q*` and back substitution on `T`.
pub fn eig_distinct(a: &CMat) -> Result<(Vec<C64>, CMat)> {
    let n = a.nrows();
    let schur = nalgebra::linalg::Schur::try_new(a.clone(), 1e-15, 10_000 * n.max(1))
        .ok_or(Error::NonConvergence("complex Schur iteration"))?;
    let (q, t) = schur.unpack();
    let lambdas: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let scale = norm_inf_mat(a).max(f64::MIN_POSITIVE);
    let mut y = CMat::zeros(n, n);
    for k in 0..n {
        // (T - lambda_k I) y = 0 with y_k = 1 and y_j = 0 for j > k.
        y[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lambdas[k];
            if d.norm() < f64::EPSILON * scale {
                d = C64::new(f64::EPSILON * scale, 0.0);
            }
            y[(i, k)] = -s / d;
        }
    }
    let mut v = q * y;
    for mut col in v.column_iter_mut() {
        let nrm = col.norm();
        col /= C64::new(nrm, 0.0);
    }
    Ok((lambdas, v))
}

/// Log of `|t|^k / k!`-style factors: `k ln|t|`, with the conventions
/// `t^0 = 1` and `0^k = 0` for `k > 0`, `0^k = inf` for `k < 0`.
pub fn ln_pow(t: f64, k: i64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * t.abs().ln()
    }
}

pub fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|j| (j as f64).ln()).sum()
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}
