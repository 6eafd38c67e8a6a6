#![allow(dead_code)]

use condode::jcf::{Eigen, JordanSpec, SpectralData};
use condode::{cmat_from_real, CMat, CVec, Model, Tolerances, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rvec(xs: &[f64]) -> CVec {
    condode::cvec_from_real(xs)
}

pub fn basis_a() -> CMat {
    cmat_from_real(2, 2, &[1.0, 0.5, 1.0, 1.0])
}

pub fn model(spec: JordanSpec, v: CMat) -> Model {
    let tol = Tolerances::default();
    let sd = SpectralData::new(spec, v, &tol).unwrap();
    Model::new(sd, tol)
}

/// One Jordan block of size 2 at 1.
pub fn a1() -> Model {
    model(JordanSpec::new(vec![Eigen::new(c(1.0, 0.0), vec![2])]).unwrap(), basis_a())
}

/// Eigenvalues 1 and -1 with the same basis.
pub fn a2() -> Model {
    let spec = JordanSpec::new(vec![Eigen::new(c(1.0, 0.0), vec![1]), Eigen::new(c(-1.0, 0.0), vec![1])]).unwrap();
    model(spec, basis_a())
}

pub fn gauss(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

pub fn cgauss(r: &mut ChaCha8Rng) -> C64 {
    c(gauss(r), gauss(r))
}

pub fn random_cvec(r: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| cgauss(r))
}

pub fn random_rvec(r: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| c(gauss(r), 0.0))
}

/// Well-conditioned basis `I + s G`.
pub fn near_identity(r: &mut ChaCha8Rng, n: usize, s: f64) -> CMat {
    let scale = s / (n as f64).sqrt();
    CMat::from_fn(n, n, |i, j| {
        let g = cgauss(r) * scale;
        if i == j {
            g + 1.0
        } else {
            g
        }
    })
}

/// Random complex decomposition with `n <= nmax`, possibly defective.
pub fn random_model(r: &mut ChaCha8Rng, nmax: usize) -> Model {
    let n = r.random_range(1..=nmax);
    let mut left = n;
    let mut eigs = Vec::new();
    while left > 0 {
        let mut blocks = Vec::new();
        let d = r.random_range(1..=2usize);
        for _ in 0..d {
            if left == 0 {
                break;
            }
            let m = r.random_range(1..=left.min(3));
            blocks.push(m);
            left -= m;
        }
        let lambda = c(r.random_range(-1.0..1.0), r.random_range(-2.0..2.0));
        eigs.push(Eigen::new(lambda, blocks));
    }
    let spec = JordanSpec::new(eigs).unwrap();
    let v = near_identity(r, n, 0.4);
    model(spec, v)
}

/// Real matrix built from groups of one simple real eigenvalue
/// (`omega = 0`) or one simple conjugate pair, with random real-paired basis.
pub fn generic_real(r: &mut ChaCha8Rng, groups: &[(f64, f64)], n: usize) -> Model {
    let mut eigs = Vec::new();
    let mut cols: Vec<CVec> = Vec::new();
    for &(re, om) in groups {
        if om == 0.0 {
            eigs.push(Eigen::new(c(re, 0.0), vec![1]));
            cols.push(random_rvec(r, n));
        } else {
            eigs.push(Eigen::new(c(re, om), vec![1]));
            eigs.push(Eigen::new(c(re, -om), vec![1]));
            let v = random_cvec(r, n);
            cols.push(v.clone());
            cols.push(v.conjugate());
        }
    }
    let used = cols.len();
    let mut extra = 0;
    while cols.len() < n {
        eigs.push(Eigen::new(c(-20.0 - extra as f64, 0.0), vec![1]));
        cols.push(random_rvec(r, n));
        extra += 1;
    }
    assert!(used <= n);
    let v = CMat::from_columns(&cols);
    model(JordanSpec::new(eigs).unwrap(), v)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn mat_rel(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
