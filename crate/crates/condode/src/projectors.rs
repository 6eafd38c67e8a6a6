//! The matrices `P_il` of the Jordan expansion of `exp(tA)` and the
//! eigen-projectors `P_i^e`.

use crate::error::{Error, Result};
use crate::jcf::{components, SpectralData};
use crate::linalg::{singular_values, CMat, CVec, C64};
use crate::tol::Tolerances;

#[derive(Clone, Debug)]
pub struct ProjectorFamily {
    /// `p[i][l]` for `l < m_i`.
    pub p: Vec<Vec<CMat>>,
    /// Projection onto the eigenvectors of `lambda_i` along the rest.
    pub pe: Vec<CMat>,
}

impl ProjectorFamily {
    pub fn get(&self, i: usize, l: usize) -> Result<&CMat> {
        let row = self.p.get(i).ok_or(Error::IndexOutOfRange { what: "eigenvalue", index: i, limit: self.p.len() })?;
        row.get(l).ok_or(Error::IndexOutOfRange { what: "power", index: l, limit: row.len() })
    }

    /// Ascent `m_i`.
    pub fn ascent(&self, i: usize) -> usize {
        self.p[i].len()
    }
}

/// `sum_j sum_k v^{(i,j,k)} w^{(i,j,k+l)}` over chains longer than `l`.
pub fn build_projectors(sd: &SpectralData) -> ProjectorFamily {
    let n = sd.n();
    let mut p = Vec::with_capacity(sd.p());
    let mut pe = Vec::with_capacity(sd.p());
    for (i, e) in sd.spec.eigs.iter().enumerate() {
        let mut row = Vec::with_capacity(e.ascent());
        for l in 0..e.ascent() {
            let mut m = CMat::zeros(n, n);
            for (j, &mij) in e.blocks.iter().enumerate() {
                for k in 0..mij.saturating_sub(l) {
                    let v = sd.v.column(sd.spec.index(i, j, k));
                    let w = sd.w.row(sd.spec.index(i, j, k + l));
                    m += v * w;
                }
            }
            row.push(m);
        }
        let mut e_proj = CMat::zeros(n, n);
        for j in 0..e.blocks.len() {
            let f = sd.spec.index(i, j, 0);
            e_proj += sd.v.column(f) * sd.w.row(f);
        }
        p.push(row);
        pe.push(e_proj);
    }
    ProjectorFamily { p, pe }
}

/// `V^{(i)} N^{(i,l)} W^{(i)}`, the block-matrix form of `P_il`.
pub fn pil_block_form(sd: &SpectralData, i: usize, l: usize) -> CMat {
    let e = &sd.spec.eigs[i];
    let off = sd.spec.offset(i);
    let nu = e.nu();
    let vi = sd.v.columns(off, nu);
    let wi = sd.w.rows(off, nu);
    let mut shift = CMat::zeros(nu, nu);
    let mut at = 0;
    for &m in &e.blocks {
        for k in 0..m.saturating_sub(l) {
            shift[(at + k, at + k + l)] = C64::new(1.0, 0.0);
        }
        at += m;
    }
    vi * shift * wi
}

pub fn apply_pil(fam: &ProjectorFamily, i: usize, l: usize, u: &CVec) -> Result<CVec> {
    let m = fam.get(i, l)?;
    if u.len() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.ncols(), found: u.len() });
    }
    Ok(m * u)
}

/// `P_il u` as the shifted component sum `sum alpha_{ij,k+l}(u) v^{(i,j,k)}`.
pub fn apply_pil_components(sd: &SpectralData, i: usize, l: usize, u: &CVec) -> Result<CVec> {
    if i >= sd.p() {
        return Err(Error::IndexOutOfRange { what: "eigenvalue", index: i, limit: sd.p() });
    }
    let e = &sd.spec.eigs[i];
    if l >= e.ascent() {
        return Err(Error::IndexOutOfRange { what: "power", index: l, limit: e.ascent() });
    }
    let alpha = components(sd, u)?;
    let mut out = CVec::zeros(sd.n());
    for (j, &m) in e.blocks.iter().enumerate() {
        for k in 0..m.saturating_sub(l) {
            out += sd.vcol(i, j, k) * alpha.get(i, j, k + l);
        }
    }
    Ok(out)
}

/// `l_i(u)`: one less than the deepest chain position with a nonzero
/// component, or `None` when `alpha^{(i)}(u)` vanishes.
pub fn dominance_l(sd: &SpectralData, i: usize, u: &CVec, tol: &Tolerances) -> Result<Option<usize>> {
    if i >= sd.p() {
        return Err(Error::IndexOutOfRange { what: "eigenvalue", index: i, limit: sd.p() });
    }
    let alpha = components(sd, u)?;
    let amax = alpha.max_abs();
    if amax == 0.0 {
        return Err(Error::ZeroVector);
    }
    let zero = tol.zero_factor * amax;
    let e = &sd.spec.eigs[i];
    let mut deepest = None;
    for (j, &m) in e.blocks.iter().enumerate() {
        for k in 0..m {
            if alpha.get(i, j, k).norm() > zero {
                deepest = Some(deepest.map_or(k, |d: usize| d.max(k)));
            }
        }
    }
    Ok(deepest)
}

/// Whether the vectorized items are linearly independent, judged by the
/// ratio of extreme singular values, plus the smallest singular value.
pub fn verify_independence(items: &[CMat], tol: &Tolerances) -> Result<(bool, f64)> {
    let first = items.first().ok_or_else(|| Error::ShapeMismatch("empty family".into()))?;
    let shape = first.shape();
    if items.iter().any(|m| m.shape() != shape) {
        return Err(Error::ShapeMismatch("items differ in shape".into()));
    }
    let len = shape.0 * shape.1;
    let stacked = CMat::from_fn(len, items.len(), |r, k| items[k][(r % shape.0, r / shape.0)]);
    let s = singular_values(&stacked);
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = if items.len() > len { 0.0 } else { s.last().copied().unwrap_or(0.0) };
    Ok((smax > 0.0 && smin > tol.indep_factor * smax, smin))
}
