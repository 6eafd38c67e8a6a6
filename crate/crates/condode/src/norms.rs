//! Vector norms, complex- and real-induced matrix norms, and norms of
//! operators restricted to a subspace.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::exec::Exec;
use crate::linalg::{imag_part, norm_inf_mat, norm_one_mat, real_part, spectral_norm, to_complex, CMat, CVec, C64};
use crate::tol::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormP {
    One,
    Two,
    Inf,
}

/// Whether maxima range over complex vectors or only over real ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semantics {
    Complex,
    Real,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormConfig {
    pub p: NormP,
    pub semantics: Semantics,
}

impl NormConfig {
    pub fn new(p: NormP, semantics: Semantics) -> Self {
        NormConfig { p, semantics }
    }

    pub fn two() -> Self {
        NormConfig::new(NormP::Two, Semantics::Complex)
    }

    pub fn real(p: NormP) -> Self {
        NormConfig::new(p, Semantics::Real)
    }
}

pub fn vector_norm(v: &CVec, p: NormP) -> f64 {
    match p {
        NormP::One => v.iter().map(|z| z.norm()).sum(),
        NormP::Two => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        NormP::Inf => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
    }
}

/// `v / ||v||`, or `None` for the zero vector.
pub fn normalize(v: &CVec, p: NormP) -> Option<CVec> {
    let n = vector_norm(v, p);
    (n > 0.0 && n.is_finite()).then(|| v / C64::new(n, 0.0))
}

/// Spectral norm of the real matrix `[Re M; Im M]`, i.e. the largest
/// `||Mx||_2` over real unit `x`.
fn real_induced_two(m: &CMat) -> f64 {
    let (re, im) = (real_part(m), imag_part(m));
    let stacked = DMatrix::from_fn(2 * m.nrows(), m.ncols(), |r, k| {
        if r < m.nrows() { re[(r, k)] } else { im[(r - m.nrows(), k)] }
    });
    if stacked.is_empty() {
        return 0.0;
    }
    stacked.singular_values().max()
}

/// `max |b . s|` over sign vectors `s`. The optimum is one of the sign
/// patterns `sign Re(e^{-i phi} b_k)`, which change only where `phi` crosses
/// `arg b_k +- pi/2`; one pattern per arc between crossings is enough.
fn real_induced_inf_row(b: &[C64]) -> f64 {
    let nz: Vec<C64> = b.iter().copied().filter(|z| z.norm() > 0.0).collect();
    if nz.is_empty() {
        return 0.0;
    }
    let tau = std::f64::consts::TAU;
    let mut cuts: Vec<f64> = nz
        .iter()
        .flat_map(|z| {
            let a = z.arg() + std::f64::consts::FRAC_PI_2;
            [a.rem_euclid(tau), (a + std::f64::consts::PI).rem_euclid(tau)]
        })
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut best: f64 = 0.0;
    for k in 0..cuts.len() {
        let next = if k + 1 < cuts.len() { cuts[k + 1] } else { cuts[0] + tau };
        let phi = 0.5 * (cuts[k] + next);
        let rot = C64::from_polar(1.0, -phi);
        let s: C64 = nz.iter().map(|&z| if (rot * z).re >= 0.0 { z } else { -z }).sum();
        best = best.max(s.norm());
    }
    best
}

/// Induced norm of `M` for the configured `p` and semantics.
pub fn induced_matrix_norm(m: &CMat, cfg: NormConfig) -> f64 {
    match (cfg.p, cfg.semantics) {
        (NormP::One, _) => norm_one_mat(m),
        (NormP::Inf, Semantics::Complex) => norm_inf_mat(m),
        (NormP::Inf, Semantics::Real) => m
            .row_iter()
            .map(|r| real_induced_inf_row(&r.iter().copied().collect::<Vec<_>>()))
            .fold(0.0, f64::max),
        (NormP::Two, Semantics::Complex) => spectral_norm(m),
        (NormP::Two, Semantics::Real) => real_induced_two(m),
    }
}

/// Norm of the row vector `b` (given by its entries) as the functional
/// `u -> b u`. Complex semantics gives the dual norm.
pub fn row_vector_norm(b: &CVec, cfg: NormConfig) -> f64 {
    match cfg.semantics {
        Semantics::Complex => match cfg.p {
            NormP::One => vector_norm(b, NormP::Inf),
            NormP::Two => vector_norm(b, NormP::Two),
            NormP::Inf => vector_norm(b, NormP::One),
        },
        Semantics::Real => real_induced_row_norm(b, cfg.p),
    }
}

/// `max |b u|` over real `u` with `||u||_p = 1`.
pub fn real_induced_row_norm(b: &CVec, p: NormP) -> f64 {
    match p {
        NormP::One => vector_norm(b, NormP::Inf),
        NormP::Two => real_induced_two(&CMat::from_row_slice(1, b.len(), b.as_slice())),
        NormP::Inf => real_induced_inf_row(b.as_slice()),
    }
}

/// Restricted operator norm `||M|_U||` for `U` spanned by the columns of
/// `basis`. Returns the value and whether it is exact; for `p` in `{1, inf}`
/// on subspaces of dimension above one it is a sampled lower estimate.
pub fn restricted_norm(m: &CMat, basis: &CMat, cfg: NormConfig, tol: &Tolerances, exec: Exec) -> (f64, bool) {
    let b = match cfg.semantics {
        Semantics::Complex => crate::linalg::orthonormal_basis(basis, 1e-10),
        Semantics::Real => real_orthonormal_basis(basis),
    };
    let d = b.ncols();
    if d == 0 {
        return (0.0, true);
    }
    let mb = m * &b;
    if cfg.p == NormP::Two {
        return (induced_matrix_norm(&mb, cfg), true);
    }
    let ratio = |x: &CVec| {
        let den = vector_norm(&(&b * x), cfg.p);
        vector_norm(&(&mb * x), cfg.p) / den
    };
    if d == 1 {
        return (ratio(&CVec::from_element(1, C64::new(1.0, 0.0))), true);
    }
    let mut best = (0..d)
        .map(|k| {
            let mut e = CVec::zeros(d);
            e[k] = C64::new(1.0, 0.0);
            ratio(&e)
        })
        .fold(0.0, f64::max);
    let real = cfg.semantics == Semantics::Real;
    let chunks = 64usize;
    let per = tol.restricted_samples.div_ceil(chunks);
    let sampled = exec.max_range(chunks, |ch| {
        let mut rng = ChaCha8Rng::seed_from_u64(tol.sample_seed);
        rng.set_stream(ch as u64);
        let mut top = 0.0f64;
        for _ in 0..per {
            let x = CVec::from_fn(d, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = if real { 0.0 } else { StandardNormal.sample(&mut rng) };
                C64::new(re, im)
            });
            top = top.max(ratio(&x));
        }
        top
    });
    best = best.max(sampled);
    (best, false)
}

/// Real orthonormal basis of the real vectors in a conjugation-closed span.
fn real_orthonormal_basis(basis: &CMat) -> CMat {
    let (re, im) = (real_part(basis), imag_part(basis));
    let n = basis.nrows();
    let both = DMatrix::from_fn(n, 2 * basis.ncols(), |r, k| {
        if k < basis.ncols() { re[(r, k)] } else { im[(r, k - basis.ncols())] }
    });
    crate::linalg::orthonormal_basis(&to_complex(&both), 1e-10)
}
