//! Grouping of the spectrum by real part and the oscillating matrices
//! `Q_jl(t)` built from it.
//!
//! Real parts are clustered with a tolerance. Inside a group the factor
//! `exp((lambda_i - r_j) t)` is used in place of `exp(i omega_i t)`, which is
//! the same thing when the real parts agree exactly and keeps the expansion
//! `exp(tA) = sum_j exp(r_j t) sum_l t^l/l! Q_jl(t)` exact when they only
//! agree to the tolerance.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::jcf::{components, SpectralData};
use crate::linalg::{CMat, CVec, C64};
use crate::norms::{restricted_norm, NormConfig};
use crate::tol::Tolerances;
use crate::Model;

#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    /// Largest real part among the members.
    pub r: f64,
    /// Eigenvalue indices, in canonical order.
    pub members: Vec<usize>,
    /// `L_j`: largest ascent in the group minus one.
    pub l_max: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPartition {
    pub groups: Vec<Group>,
}

impl SpectralPartition {
    pub fn q(&self) -> usize {
        self.groups.len()
    }

    pub fn group(&self, j: usize) -> Result<&Group> {
        self.groups.get(j).ok_or(Error::IndexOutOfRange { what: "group", index: j, limit: self.groups.len() })
    }

    pub fn group_of(&self, i: usize) -> usize {
        self.groups.iter().position(|g| g.members.contains(&i)).expect("every eigenvalue is grouped")
    }

    pub fn last(&self) -> &Group {
        self.groups.last().expect("partition is nonempty")
    }
}

/// Groups eigenvalues whose real parts chain together within `tol_group`.
pub fn partition_spectrum(sd: &SpectralData, tol_group: f64) -> SpectralPartition {
    let mut groups: Vec<Group> = Vec::new();
    let mut prev_re = f64::INFINITY;
    for (i, e) in sd.spec.eigs.iter().enumerate() {
        let re = e.lambda.re;
        match groups.last_mut() {
            Some(g) if prev_re - re <= tol_group => {
                g.members.push(i);
                g.l_max = g.l_max.max(e.ascent() - 1);
            }
            _ => groups.push(Group { r: re, members: vec![i], l_max: e.ascent() - 1 }),
        }
        prev_re = re;
    }
    SpectralPartition { groups }
}

fn phase(model: &Model, i: usize, r: f64, t: f64) -> C64 {
    let lam = model.sd.lambda(i);
    ((lam - C64::new(r, 0.0)) * t).exp()
}

/// `Q_jl(t)`.
pub fn q_jl(model: &Model, j: usize, l: usize, t: f64) -> Result<CMat> {
    let g = model.part.group(j)?;
    if l > g.l_max {
        return Err(Error::IndexOutOfRange { what: "power", index: l, limit: g.l_max + 1 });
    }
    let n = model.n();
    let mut out = CMat::zeros(n, n);
    for &i in &g.members {
        if let Some(p) = model.fam.p[i].get(l) {
            out += p * phase(model, i, g.r, t);
        }
    }
    Ok(out)
}

/// `Q_jl(t) u`.
pub fn q_jl_apply(model: &Model, j: usize, l: usize, t: f64, u: &CVec) -> Result<CVec> {
    let g = model.part.group(j)?;
    if l > g.l_max {
        return Err(Error::IndexOutOfRange { what: "power", index: l, limit: g.l_max + 1 });
    }
    if u.len() != model.n() {
        return Err(Error::DimensionMismatch { expected: model.n(), found: u.len() });
    }
    let mut out = CVec::zeros(model.n());
    for &i in &g.members {
        if let Some(p) = model.fam.p[i].get(l) {
            out += (p * u) * phase(model, i, g.r, t);
        }
    }
    Ok(out)
}

/// `Q_j^e(t)`, the eigenvector part of group `j`.
pub fn q_e(model: &Model, j: usize, t: f64) -> Result<CMat> {
    let g = model.part.group(j)?;
    let n = model.n();
    let mut out = CMat::zeros(n, n);
    for &i in &g.members {
        out += &model.fam.pe[i] * phase(model, i, g.r, t);
    }
    Ok(out)
}

/// Columns spanning `U_j^e`, the eigenvectors of group `j`.
pub fn eigenbasis(model: &Model, j: usize) -> Result<CMat> {
    let g = model.part.group(j)?;
    let mut cols = Vec::new();
    for &i in &g.members {
        for jj in 0..model.sd.spec.eigs[i].blocks.len() {
            cols.push(model.sd.spec.index(i, jj, 0));
        }
    }
    Ok(CMat::from_fn(model.n(), cols.len(), |r, k| model.sd.v[(r, cols[k])]))
}

/// `||Q_j^e(-t)|_{U_j^e}||` and whether the value is exact.
pub fn restricted_inverse_norm(model: &Model, j: usize, t: f64, cfg: NormConfig, exec: Exec) -> Result<(f64, bool)> {
    let m = q_e(model, j, -t)?;
    let b = eigenbasis(model, j)?;
    Ok(restricted_norm(&m, &b, cfg, &model.tol, exec))
}

/// Indices of dominance of a vector `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominanceProfile {
    /// `j(u)`.
    pub j_star: usize,
    /// `L(u)`.
    pub l_star: usize,
    /// `L_j(u)` per group, `None` when `Lambda_j(u)` is empty.
    pub per_group: Vec<Option<usize>>,
    /// `Lambda_j(u)`: members with a nonzero component of `u`.
    pub members: Vec<Vec<usize>>,
}

pub fn dominance_profile(sd: &SpectralData, part: &SpectralPartition, u: &CVec, tol: &Tolerances) -> Result<DominanceProfile> {
    let alpha = components(sd, u)?;
    let amax = alpha.max_abs();
    if !(amax > 0.0) {
        return Err(Error::ZeroVector);
    }
    let zero = tol.zero_factor * amax;
    let l_of = |i: usize| -> Option<usize> {
        let e = &sd.spec.eigs[i];
        let mut deepest: Option<usize> = None;
        for (j, &m) in e.blocks.iter().enumerate() {
            for k in 0..m {
                if alpha.get(i, j, k).norm() > zero {
                    deepest = Some(deepest.map_or(k, |d| d.max(k)));
                }
            }
        }
        deepest
    };
    let mut per_group = Vec::with_capacity(part.q());
    let mut members = Vec::with_capacity(part.q());
    for g in &part.groups {
        let mut lj: Option<usize> = None;
        let mut mem = Vec::new();
        for &i in &g.members {
            if let Some(l) = l_of(i) {
                mem.push(i);
                lj = Some(lj.map_or(l, |x| x.max(l)));
            }
        }
        per_group.push(lj);
        members.push(mem);
    }
    let j_star = per_group.iter().position(Option::is_some).ok_or(Error::ZeroVector)?;
    let l_star = per_group[j_star].expect("found above");
    Ok(DominanceProfile { j_star, l_star, per_group, members })
}

/// `||Q_jl(t, -A) - (-1)^l Q_{q+1-j, l}(-t)||_inf`, with the left side taken
/// from the rescaled decomposition of `-A`.
pub fn negation_identity_check(model: &Model, j: usize, l: usize, t: f64) -> Result<f64> {
    let neg = model.scaled(C64::new(-1.0, 0.0))?;
    let q = model.part.q();
    if neg.part.q() != q {
        return Err(Error::ShapeMismatch("partitions of A and -A differ".into()));
    }
    let lhs = q_jl(&neg, j, l, t)?;
    let mut rhs = q_jl(model, q - 1 - j, l, -t)?;
    if l % 2 == 1 {
        rhs = -rhs;
    }
    Ok(crate::linalg::norm_inf_mat(&(lhs - rhs)))
}
