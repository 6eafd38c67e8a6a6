mod common;

use common::*;
use condode::expm::*;
use condode::jcf::{Eigen, JordanSpec};
use condode::partition::q_jl;
use condode::norms::induced_matrix_norm;
use condode::{cmat_from_real, CMat, Error, NormConfig, NormP, Semantics};
use rand::Rng;

#[test]
fn simple_exponentials() {
    let m = a1();
    assert!(mat_rel(&expm_jordan(&m, 0.0).unwrap(), &CMat::identity(2, 2)) < 1e-15);
    let spec = JordanSpec::new(vec![Eigen::new(c(1.0, 0.0), vec![1]), Eigen::new(c(-1.0, 0.0), vec![1])]).unwrap();
    let d = model(spec, CMat::identity(2, 2));
    let e = expm_jordan(&d, 1.0).unwrap();
    let want = cmat_from_real(2, 2, &[1f64.exp(), 0.0, 0.0, (-1f64).exp()]);
    assert!(mat_rel(&e, &want) < 1e-15);
    assert!(mat_rel(&expm_jordan(&m, 0.5).unwrap(), &expm_oracle(&m.sd.a, 0.5)) < 1e-12);
    assert!(matches!(expm_jordan(&m, 1000.0), Err(Error::OverflowRisk { .. })));
}

#[test]
fn oracle_sanity() {
    let n = cmat_from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let e = expm_oracle(&n, 1.0);
    assert!((e - cmat_from_real(2, 2, &[1.0, 1.0, 0.0, 1.0])).norm() < 1e-15);
    let m = a2();
    let w = cmat_from_real(2, 2, &[2.0, -1.0, -2.0, 2.0]);
    let want = basis_a() * cmat_from_real(2, 2, &[1f64.exp(), 0.0, 0.0, (-1f64).exp()]) * w;
    assert!(mat_rel(&expm_oracle(&m.sd.a, 1.0), &want) < 1e-13);
    let mut r = rng(1);
    for _ in 0..10 {
        let a = near_identity(&mut r, 5, 2.0);
        let (s, t) = (r.random_range(0.0..1.0), r.random_range(0.0..1.0));
        let lhs = expm_oracle(&a, s) * expm_oracle(&a, t);
        assert!(mat_rel(&lhs, &expm_oracle(&a, s + t)) < 1e-12);
    }
}

#[test]
fn jordan_matches_oracle_on_random_decompositions() {
    let mut r = rng(2);
    for _ in 0..50 {
        let m = random_model(&mut r, 10);
        let t = r.random_range(0.0..5.0);
        let e = expm_jordan(&m, t).unwrap();
        assert!(mat_rel(&e, &expm_oracle(&m.sd.a, t)) < 1e-10);
    }
}

#[test]
fn diagonalizable_epsilon_formula() {
    let m = a2();
    let cfg = NormConfig::two();
    for t in [0.5, 1.0, 3.0] {
        let n = |j, t| induced_matrix_norm(&q_jl(&m, j, 0, t).unwrap(), cfg);
        let want = (-2.0 * t as f64).exp() * n(1, t) / n(0, t);
        assert!(rel(eps_matrix(&m, t, cfg), want) < 1e-14);
    }
}

#[test]
fn vector_forms() {
    let m = a2();
    let cfg = NormConfig::two();
    let u = rvec(&[1.0, 1.0]);
    let f = asymptotic_vector(&m, cfg, &u).unwrap();
    assert_eq!((f.r, f.l), (1.0, 0));
    assert!((f.value(2.0).column(0) - rvec(&[2f64.exp(), 2f64.exp()])).norm() < 1e-12);
    assert_eq!(f.precision(2.0), 0.0);
    let u = rvec(&[0.0, 1.0]);
    let f = asymptotic_vector(&m, cfg, &u).unwrap();
    assert!(f.deviation(5.0) <= f.precision(5.0) + 1e-12);
    assert!(f.precision(5.0) < f.precision(1.0));
    assert!(matches!(asymptotic_vector(&m, cfg, &rvec(&[0.0, 0.0])), Err(Error::ZeroVector)));
}

#[test]
fn bounds_hold_on_random_models() {
    let mut r = rng(3);
    for _ in 0..30 {
        let m = random_model(&mut r, 7);
        let p = [NormP::One, NormP::Two, NormP::Inf][r.random_range(0..3)];
        let cfg = NormConfig::new(p, Semantics::Complex);
        let fm = asymptotic_matrix(&m, cfg);
        let u = random_cvec(&mut r, m.n());
        let fv = asymptotic_vector(&m, cfg, &u).unwrap();
        for k in 1..20 {
            let t = 0.5 * k as f64;
            assert!(fm.precision(t) >= 0.0);
            assert!(fm.deviation(t) <= fm.precision(t) + 1e-12, "{} {}", fm.deviation(t), fm.precision(t));
            assert!(fv.deviation(t) <= fv.precision(t) + 1e-12);
            let direct = (fm.value(t)).norm();
            assert!((fm.ln_norm(t) - induced_matrix_norm(&fm.value(t), cfg).ln()).abs() < 1e-10 || direct == 0.0);
        }
    }
}

#[test]
fn epsilon_decays_after_burn_in() {
    let mut r = rng(4);
    let m = generic_real(&mut r, &[(0.5, 2.0), (0.0, 0.0), (-0.5, 3.0)], 5);
    let cfg = NormConfig::two();
    let avg = |t0: f64| (0..64).map(|k| eps_matrix(&m, t0 + k as f64 * std::f64::consts::PI / 64.0, cfg)).sum::<f64>() / 64.0;
    let t0 = (0..400).map(|k| k as f64 * 0.05).find(|&t| eps_matrix(&m, t, cfg) < 1.0).unwrap().max(0.5);
    let mut prev = avg(t0);
    for k in 1..=6 {
        let a = avg(t0 * (1.0 + 0.5 * k as f64));
        assert!(a <= prev);
        prev = a;
    }
}
