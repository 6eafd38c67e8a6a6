mod common;

use common::*;
use condode::linalg::singular_values;
use condode::projectors::*;
use condode::{cmat_from_real, CMat, Error, Tolerances};

#[test]
fn worked_example_projectors() {
    let m = a1();
    assert!(mat_rel(m.fam.get(0, 1).unwrap(), &cmat_from_real(2, 2, &[-2.0, 2.0, -2.0, 2.0])) < 1e-14);
    assert!(mat_rel(m.fam.get(0, 0).unwrap(), &CMat::identity(2, 2)) < 1e-14);
    let m = a2();
    assert!(mat_rel(m.fam.get(0, 0).unwrap(), &cmat_from_real(2, 2, &[2.0, -1.0, 2.0, -1.0])) < 1e-14);
    assert!(mat_rel(m.fam.get(1, 0).unwrap(), &cmat_from_real(2, 2, &[-1.0, 1.0, -2.0, 2.0])) < 1e-14);
    let id = model(
        condode::jcf::JordanSpec::new(vec![condode::jcf::Eigen::new(c(1.0, 0.0), vec![1, 1, 1])]).unwrap(),
        CMat::identity(3, 3),
    );
    assert_eq!(id.fam.ascent(0), 1);
    assert!(matches!(id.fam.get(0, 1), Err(Error::IndexOutOfRange { .. })));
    assert!(mat_rel(&id.fam.pe[0], &CMat::identity(3, 3)) < 1e-15);
}

#[test]
fn apply_matches_components() {
    let m = a1();
    let u = rvec(&[0.0, 1.0]);
    let pu = apply_pil(&m.fam, 0, 1, &u).unwrap();
    assert!((pu - rvec(&[2.0, 2.0])).norm() < 1e-14);
    let mut r = rng(3);
    for _ in 0..20 {
        let m = random_model(&mut r, 8);
        let u = random_cvec(&mut r, m.n());
        for i in 0..m.sd.p() {
            for l in 0..m.fam.ascent(i) {
                let a = apply_pil(&m.fam, i, l, &u).unwrap();
                let b = apply_pil_components(&m.sd, i, l, &u).unwrap();
                assert!((&a - &b).norm() <= 1e-12 * (1.0 + a.norm()));
                assert!(mat_rel(m.fam.get(i, l).unwrap(), &pil_block_form(&m.sd, i, l)) < 1e-12);
                if l >= 1 {
                    for j in 0..m.sd.spec.eigs[i].blocks.len() {
                        let head = m.sd.vcol(i, j, 0);
                        assert!(apply_pil(&m.fam, i, l, &head).unwrap().norm() < 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn projector_algebra() {
    let mut r = rng(4);
    for _ in 0..20 {
        let m = random_model(&mut r, 8);
        let n = m.n();
        let mut sum = CMat::zeros(n, n);
        for i in 0..m.sd.p() {
            let p0 = m.fam.get(i, 0).unwrap();
            assert!((p0 * p0 - p0).norm() <= 1e-10 * p0.norm());
            sum += p0;
        }
        assert!((sum - CMat::identity(n, n)).norm() < 1e-10);
    }
}

#[test]
fn real_pairing_of_projectors() {
    let mut r = rng(5);
    let m = generic_real(&mut r, &[(1.0, 1.0), (0.0, 0.0), (-2.0, 3.0)], 5);
    for i in 0..m.sd.p() {
        let l = m.sd.lambda(i);
        let p = m.fam.get(i, 0).unwrap();
        if l.im == 0.0 {
            assert!(p.iter().all(|z| z.im.abs() < 1e-12));
        } else {
            let b = (0..m.sd.p()).find(|&b| m.sd.lambda(b) == l.conj()).unwrap();
            assert!((p.map(|z| z.conj()) - m.fam.get(b, 0).unwrap()).norm() < 1e-12);
        }
    }
}

#[test]
fn dominance_index() {
    let tol = Tolerances::default();
    let m = a1();
    assert_eq!(dominance_l(&m.sd, 0, &rvec(&[1.0, 1.0]), &tol).unwrap(), Some(0));
    assert_eq!(dominance_l(&m.sd, 0, &rvec(&[0.0, 1.0]), &tol).unwrap(), Some(1));
    let m2 = a2();
    assert_eq!(dominance_l(&m2.sd, 1, &rvec(&[1.0, 1.0]), &tol).unwrap(), None);
    assert_eq!(dominance_l(&m2.sd, 0, &rvec(&[1.0, 1.0]), &tol).unwrap(), Some(0));
    assert!(matches!(dominance_l(&m.sd, 0, &rvec(&[0.0, 0.0]), &tol), Err(Error::ZeroVector)));
    let mut r = rng(6);
    for _ in 0..20 {
        let m = random_model(&mut r, 8);
        let u = random_cvec(&mut r, m.n());
        for i in 0..m.sd.p() {
            let li = dominance_l(&m.sd, i, &u, &tol).unwrap();
            for l in 0..m.fam.ascent(i) {
                let nz = apply_pil(&m.fam, i, l, &u).unwrap().norm() > 1e-10 * u.norm();
                assert_eq!(nz, li.is_some_and(|li| l <= li));
            }
        }
    }
}

#[test]
fn independence_checks() {
    let tol = Tolerances::default();
    let m = a1();
    let fam = vec![m.fam.get(0, 0).unwrap().clone(), m.fam.get(0, 1).unwrap().clone()];
    assert!(verify_independence(&fam, &tol).unwrap().0);
    let mm = m.fam.get(0, 1).unwrap().clone();
    assert!(!verify_independence(&[mm.clone(), mm * c(2.0, 0.0)], &tol).unwrap().0);
    let m2 = a2();
    let u = rvec(&[0.0, 1.0]);
    let vs: Vec<CMat> = (0..2).map(|i| CMat::from_column_slice(2, 1, apply_pil(&m2.fam, i, 0, &u).unwrap().as_slice())).collect();
    assert!(verify_independence(&vs, &tol).unwrap().0);
    assert!(matches!(verify_independence(&[CMat::zeros(2, 2), CMat::zeros(3, 3)], &tol), Err(Error::ShapeMismatch(_))));

    let mut r = rng(7);
    for _ in 0..20 {
        let m = random_model(&mut r, 8);
        let all: Vec<CMat> = (0..m.sd.p()).flat_map(|i| (0..m.fam.ascent(i)).map(move |l| (i, l))).map(|(i, l)| m.fam.get(i, l).unwrap().clone()).collect();
        assert!(verify_independence(&all, &tol).unwrap().0);
        let u = random_cvec(&mut r, m.n());
        for i in 0..m.sd.p() {
            let li = dominance_l(&m.sd, i, &u, &tol).unwrap().unwrap();
            let vs: Vec<CMat> = (0..=li).map(|l| CMat::from_column_slice(m.n(), 1, apply_pil(&m.fam, i, l, &u).unwrap().as_slice())).collect();
            assert!(verify_independence(&vs, &tol).unwrap().0);
        }
    }
}

#[test]
fn unique_longest_chain_gives_rank_one_top() {
    let mut r = rng(8);
    let spec = condode::jcf::JordanSpec::new(vec![condode::jcf::Eigen::new(c(0.5, 0.0), vec![3, 1, 2])]).unwrap();
    let m = model(spec, near_identity(&mut r, 6, 0.3));
    let top = m.fam.get(0, 2).unwrap();
    let s = singular_values(top);
    assert!(s[1] <= 1e-12 * s[0]);
}
