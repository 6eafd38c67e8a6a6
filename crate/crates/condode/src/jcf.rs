//! Jordan structures, Jordan bases and component vectors.
//!
//! Indices are zero-based throughout: eigenvalue `i`, mini-block `j`, chain
//! position `k`, where `k = 0` is the eigenvector heading the chain.

use crate::error::{Error, Result};
use crate::linalg::{c, cond2, inverse, is_real_mat, norm_inf_mat, CMat, CVec, C64};
use crate::tol::Tolerances;

/// One eigenvalue with the sizes of its mini-blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigen {
    pub lambda: C64,
    pub blocks: Vec<usize>,
}

impl Eigen {
    pub fn new(lambda: C64, blocks: Vec<usize>) -> Self {
        Eigen { lambda, blocks }
    }

    /// Algebraic multiplicity.
    pub fn nu(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Length of the longest chain.
    pub fn ascent(&self) -> usize {
        self.blocks.iter().copied().max().unwrap_or(0)
    }

    pub fn is_defective(&self) -> bool {
        self.ascent() > 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JordanSpec {
    pub eigs: Vec<Eigen>,
}

impl JordanSpec {
    pub fn new(eigs: Vec<Eigen>) -> Result<Self> {
        if eigs.is_empty() {
            return Err(Error::InvalidSpec("no eigenvalues".into()));
        }
        for (a, e) in eigs.iter().enumerate() {
            if e.blocks.is_empty() || e.blocks.contains(&0) {
                return Err(Error::InvalidSpec(format!(
                    "eigenvalue {} needs mini-blocks of size >= 1",
                    e.lambda
                )));
            }
            if !e.lambda.re.is_finite() || !e.lambda.im.is_finite() {
                return Err(Error::InvalidSpec("non-finite eigenvalue".into()));
            }
            if eigs[..a].iter().any(|f| f.lambda == e.lambda) {
                return Err(Error::InvalidSpec(format!("eigenvalue {} repeated", e.lambda)));
            }
        }
        Ok(JordanSpec { eigs })
    }

    pub fn n(&self) -> usize {
        self.eigs.iter().map(Eigen::nu).sum()
    }

    pub fn p(&self) -> usize {
        self.eigs.len()
    }

    /// First flat index of eigenvalue `i`.
    pub fn offset(&self, i: usize) -> usize {
        self.eigs[..i].iter().map(Eigen::nu).sum()
    }

    /// Flat index of `(i, j, k)`.
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        self.offset(i) + self.eigs[i].blocks[..j].iter().sum::<usize>() + k
    }

    /// Inverse of [`JordanSpec::index`].
    pub fn triple(&self, flat: usize) -> (usize, usize, usize) {
        let mut rest = flat;
        for (i, e) in self.eigs.iter().enumerate() {
            for (j, &m) in e.blocks.iter().enumerate() {
                if rest < m {
                    return (i, j, rest);
                }
                rest -= m;
            }
        }
        panic!("flat index {flat} out of range");
    }

    /// The upper bidiagonal Jordan matrix.
    pub fn jordan_matrix(&self) -> CMat {
        let n = self.n();
        let mut j = CMat::zeros(n, n);
        let mut at = 0;
        for e in &self.eigs {
            for &m in &e.blocks {
                for k in 0..m {
                    j[(at + k, at + k)] = e.lambda;
                    if k + 1 < m {
                        j[(at + k, at + k + 1)] = c(1.0, 0.0);
                    }
                }
                at += m;
            }
        }
        j
    }

    /// Permutation sorting eigenvalues by descending real, then imaginary part.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.p()).collect();
        perm.sort_by(|&a, &b| {
            let (x, y) = (self.eigs[a].lambda, self.eigs[b].lambda);
            y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im))
        });
        perm
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical_order().iter().enumerate().all(|(a, &b)| a == b)
    }
}

/// Where a decomposition came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Given,
    Computed,
}

/// A Jordan basis `V`, its inverse `W` and the matrix they diagonalize.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub spec: JordanSpec,
    pub v: CMat,
    pub w: CMat,
    pub a: CMat,
    /// Real eigenvalues carry real chains and conjugate eigenvalues carry
    /// conjugate chains, so `A` is real.
    pub real_paired: bool,
    pub provenance: Provenance,
}

/// `V J V^{-1}`.
pub fn assemble_matrix(spec: &JordanSpec, v: &CMat, tol: &Tolerances) -> Result<CMat> {
    let n = spec.n();
    if v.nrows() != n || v.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.nrows().max(v.ncols()) });
    }
    let w = checked_inverse(v, tol)?;
    Ok(v * spec.jordan_matrix() * w)
}

fn checked_inverse(v: &CMat, tol: &Tolerances) -> Result<CMat> {
    let cond = cond2(v);
    if !(cond <= tol.cond_cap) {
        return Err(Error::SingularBasis { cond });
    }
    let w = inverse(v)?;
    let n = v.nrows();
    let resid = norm_inf_mat(&(v * &w - CMat::identity(n, n)));
    if resid > tol.eta_inv(n) {
        return Err(Error::SingularBasis { cond });
    }
    Ok(w)
}

fn reorder(spec: &JordanSpec, v: &CMat, w: &CMat, perm: &[usize]) -> (JordanSpec, CMat, CMat) {
    let n = spec.n();
    let mut cols = Vec::with_capacity(n);
    for &i in perm {
        let off = spec.offset(i);
        cols.extend(off..off + spec.eigs[i].nu());
    }
    let v2 = CMat::from_fn(n, n, |r, k| v[(r, cols[k])]);
    let w2 = CMat::from_fn(n, n, |k, r| w[(cols[k], r)]);
    let eigs = perm.iter().map(|&i| spec.eigs[i].clone()).collect();
    (JordanSpec { eigs }, v2, w2)
}

/// Detects the real pairing of a canonical decomposition within `tol` and,
/// when present, makes it exact.
fn snap_real_pairing(spec: &mut JordanSpec, v: &mut CMat, tol: f64) -> bool {
    let p = spec.p();
    let n = spec.n();
    let mut partner = vec![None; p];
    for i in 0..p {
        let e = &spec.eigs[i];
        if e.lambda.im == 0.0 {
            let off = spec.offset(i);
            let real_cols = (off..off + e.nu()).all(|k| v.column(k).iter().all(|z| z.im.abs() <= tol));
            if !real_cols {
                return false;
            }
            partner[i] = Some(i);
        } else if e.lambda.im > 0.0 {
            let found = (0..p).find(|&b| {
                spec.eigs[b].lambda == e.lambda.conj() && spec.eigs[b].blocks == e.blocks
            });
            let Some(b) = found else { return false };
            let (o1, o2) = (spec.offset(i), spec.offset(b));
            for k in 0..e.nu() {
                for r in 0..n {
                    if (v[(r, o1 + k)].conj() - v[(r, o2 + k)]).norm() > tol {
                        return false;
                    }
                }
            }
            partner[i] = Some(b);
            partner[b] = Some(i);
        }
    }
    if partner.iter().any(Option::is_none) {
        return false;
    }
    for i in 0..p {
        let e = spec.eigs[i].clone();
        let off = spec.offset(i);
        if e.lambda.im == 0.0 {
            for k in off..off + e.nu() {
                for r in 0..n {
                    v[(r, k)].im = 0.0;
                }
            }
        } else if e.lambda.im > 0.0 {
            let b = partner[i].unwrap();
            let o2 = spec.offset(b);
            for k in 0..e.nu() {
                for r in 0..n {
                    v[(r, o2 + k)] = v[(r, off + k)].conj();
                }
            }
        }
    }
    true
}

impl SpectralData {
    /// Decomposition from a Jordan structure and a basis whose column blocks
    /// follow the order of `spec.eigs`. The result is put in canonical order.
    pub fn new(spec: JordanSpec, v: CMat, tol: &Tolerances) -> Result<Self> {
        let n = spec.n();
        if v.nrows() != n || v.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.nrows().max(v.ncols()) });
        }
        let w = checked_inverse(&v, tol)?;
        let perm = spec.canonical_order();
        let (mut spec, mut v, _) = reorder(&spec, &v, &w, &perm);
        let snap = 1e-12 * v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let real_paired = snap_real_pairing(&mut spec, &mut v, snap);
        let w = checked_inverse(&v, tol)?;
        let mut a = &v * spec.jordan_matrix() * &w;
        if real_paired {
            a.iter_mut().for_each(|z| z.im = 0.0);
        }
        Ok(SpectralData { spec, v, w, a, real_paired, provenance: Provenance::Given })
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn p(&self) -> usize {
        self.spec.p()
    }

    pub fn lambda(&self, i: usize) -> C64 {
        self.spec.eigs[i].lambda
    }

    /// Column `v^{(i,j,k)}`.
    pub fn vcol(&self, i: usize, j: usize, k: usize) -> CVec {
        self.v.column(self.spec.index(i, j, k)).into_owned()
    }

    /// Row `w^{(i,j,k)}` as a column vector of its entries.
    pub fn wrow(&self, i: usize, j: usize, k: usize) -> CVec {
        self.w.row(self.spec.index(i, j, k)).transpose()
    }

    /// Largest chain residual `||(A - lambda I) v^{(k)} - v^{(k-1)}||_inf`.
    pub fn chain_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, e) in self.spec.eigs.iter().enumerate() {
            for (j, &m) in e.blocks.iter().enumerate() {
                for k in 0..m {
                    let vk = self.vcol(i, j, k);
                    let mut r = &self.a * &vk - &vk * e.lambda;
                    if k > 0 {
                        r -= self.vcol(i, j, k - 1);
                    }
                    worst = worst.max(r.iter().map(|z| z.norm()).fold(0.0, f64::max));
                }
            }
        }
        worst
    }

    pub fn inverse_residual(&self) -> f64 {
        let n = self.n();
        norm_inf_mat(&(&self.v * &self.w - CMat::identity(n, n)))
    }
}

/// Eigen-decomposition of a matrix whose eigenvalues are pairwise separated
/// by more than `tol.tol_distinct(a)`. Real input yields a real-paired basis.
pub fn from_diagonalizable(a: &CMat, tol: &Tolerances) -> Result<SpectralData> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    let real = is_real_mat(a);
    let tol_d = tol.tol_distinct(a);
    let (mut lambdas, mut vecs) = crate::linalg::eig_distinct(a)?;
    for x in 0..n {
        for y in (x + 1)..n {
            if (lambdas[x] - lambdas[y]).norm() <= tol_d {
                return Err(Error::ClusteredSpectrum {
                    a: lambdas[x].to_string(),
                    b: lambdas[y].to_string(),
                    tol: tol_d,
                });
            }
        }
    }
    if real {
        pair_conjugates(&mut lambdas, &mut vecs, tol_d)?;
    }
    let eigs = lambdas.iter().map(|&l| Eigen::new(l, vec![1])).collect();
    let spec = JordanSpec::new(eigs)?;
    let mut sd = SpectralData::new(spec, vecs, tol)?;
    sd.a = a.clone();
    sd.provenance = Provenance::Computed;
    let resid = sd.chain_residual();
    if resid > tol.eta_chain(a) {
        return Err(Error::NonConvergence("eigenvector refinement"));
    }
    Ok(sd)
}

fn pair_conjugates(lambdas: &mut [C64], vecs: &mut CMat, tol_d: f64) -> Result<()> {
    let n = lambdas.len();
    let mut done = vec![false; n];
    for x in 0..n {
        if done[x] {
            continue;
        }
        let l = lambdas[x];
        if l.im.abs() < tol_d {
            lambdas[x] = c(l.re, 0.0);
            let mut col = vecs.column(x).into_owned();
            let (piv, _) = col.iter().enumerate().fold((0, 0.0), |acc, (k, z)| {
                if z.norm() > acc.1 { (k, z.norm()) } else { acc }
            });
            let phase = col[piv] / C64::new(col[piv].norm(), 0.0);
            col /= phase;
            col.iter_mut().for_each(|z| z.im = 0.0);
            let nrm = col.norm();
            vecs.set_column(x, &(col / C64::new(nrm, 0.0)));
            done[x] = true;
            continue;
        }
        let y = (0..n)
            .filter(|&y| y != x && !done[y])
            .min_by(|&a, &b| {
                (lambdas[a] - l.conj()).norm().total_cmp(&(lambdas[b] - l.conj()).norm())
            })
            .ok_or(Error::NonConvergence("conjugate pairing"))?;
        let (up, down) = if l.im > 0.0 { (x, y) } else { (y, x) };
        let lu = if l.im > 0.0 { l } else { l.conj() };
        let lu = C64::new(0.5 * (lu.re + lambdas[down].re), 0.5 * (lu.im - lambdas[down].im));
        lambdas[up] = lu;
        lambdas[down] = lu.conj();
        let col = vecs.column(up).into_owned();
        vecs.set_column(down, &col.map(|z| z.conj()));
        done[x] = true;
        done[y] = true;
    }
    Ok(())
}

/// Decomposition of `zA`: eigenvalues `z lambda`, chains rescaled by powers
/// of `z` so the Jordan form keeps its unit superdiagonal.
pub fn scale_decomposition(sd: &SpectralData, z: C64) -> Result<SpectralData> {
    if z == c(0.0, 0.0) {
        return Err(Error::ZeroScalar);
    }
    let mut v = sd.v.clone();
    let mut w = sd.w.clone();
    for (i, e) in sd.spec.eigs.iter().enumerate() {
        for (j, &m) in e.blocks.iter().enumerate() {
            for k in 0..m {
                let f = sd.spec.index(i, j, k);
                let s = z.powi(k as i32);
                v.column_mut(f).iter_mut().for_each(|x| *x /= s);
                w.row_mut(f).iter_mut().for_each(|x| *x *= s);
            }
        }
    }
    let eigs: Vec<Eigen> = sd
        .spec
        .eigs
        .iter()
        .map(|e| Eigen::new(z * e.lambda, e.blocks.clone()))
        .collect();
    let spec = JordanSpec::new(eigs)?;
    let perm = spec.canonical_order();
    let (spec, v, w) = reorder(&spec, &v, &w, &perm);
    let real_paired = sd.real_paired && z.im == 0.0;
    let a = sd.a.map(|x| x * z);
    Ok(SpectralData { spec, v, w, a, real_paired, provenance: sd.provenance })
}

/// `alpha(u) = W u`, addressed by `(i, j, k)`.
#[derive(Clone, Debug)]
pub struct ComponentVector {
    pub alpha: CVec,
    spec: JordanSpec,
}

impl ComponentVector {
    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.alpha[self.spec.index(i, j, k)]
    }

    /// `alpha^{(i)}(u)`.
    pub fn block(&self, i: usize) -> &[C64] {
        let off = self.spec.offset(i);
        &self.alpha.as_slice()[off..off + self.spec.eigs[i].nu()]
    }

    /// `alpha^{(i,j)}(u)`.
    pub fn miniblock(&self, i: usize, j: usize) -> &[C64] {
        let off = self.spec.index(i, j, 0);
        &self.alpha.as_slice()[off..off + self.spec.eigs[i].blocks[j]]
    }

    pub fn max_abs(&self) -> f64 {
        self.alpha.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn components(sd: &SpectralData, u: &CVec) -> Result<ComponentVector> {
    if u.len() != sd.n() {
        return Err(Error::DimensionMismatch { expected: sd.n(), found: u.len() });
    }
    Ok(ComponentVector { alpha: &sd.w * u, spec: sd.spec.clone() })
}
