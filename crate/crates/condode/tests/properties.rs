mod common;

use std::f64::consts::{PI, TAU};

use common::*;
use condode::condnum::{k_exact, k_inf_initial};
use condode::expm::{asymptotic_matrix, expm_jordan, expm_oracle};
use condode::genreal::{extract_all, HFunction, VwFunctions};
use condode::jcf::{components, scale_decomposition};
use condode::norms::{real_induced_row_norm, row_vector_norm};
use condode::{CMat, CVec, NormConfig, NormP, Semantics};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn components_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_model(&mut r, 8);
        let n = m.n();
        let u = random_cvec(&mut r, n);
        let a = components(&m.sd, &u).unwrap();
        let alpha = CVec::from_iterator(n, (0..n).map(|f| { let (i, j, k) = m.sd.spec.triple(f); a.get(i, j, k) }));
        prop_assert!((&m.sd.v * alpha - &u).norm() <= 1e-10 * u.norm());
    }

    #[test]
    fn scaling_is_an_involution(seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        prop_assume!(re.hypot(im) > 0.1);
        let mut r = rng(seed);
        let m = random_model(&mut r, 6);
        let z = c(re, im);
        let back = scale_decomposition(&scale_decomposition(&m.sd, z).unwrap(), z.inv()).unwrap();
        prop_assert!((&back.v - &m.sd.v).iter().all(|d| d.norm() < 1e-12));
    }

    #[test]
    fn projector_scaling_law(seed in any::<u64>(), k in 0usize..3) {
        let z = [c(-1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)][k];
        let mut r = rng(seed);
        let m = random_model(&mut r, 7);
        let s = m.scaled(z).unwrap();
        for i in 0..m.sd.p() {
            let lam = m.sd.lambda(i) * z;
            let is = (0..s.sd.p()).find(|&b| (s.sd.lambda(b) - lam).norm() < 1e-14).unwrap();
            for l in 0..m.fam.ascent(i) {
                let want = m.fam.get(i, l).unwrap() * z.powu(l as u32);
                let got = s.fam.get(is, l).unwrap();
                prop_assert!((got - &want).norm() <= 1e-12 * (1.0 + want.norm()));
            }
        }
    }

    #[test]
    fn kernel_nesting(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_model(&mut r, 8);
        let n = m.n();
        // Mix in chain heads so that some higher projections vanish.
        let mut u = CVec::zeros(n);
        for f in 0..n {
            let (i, j, k) = m.sd.spec.triple(f);
            if k == 0 || r.random_bool(0.3) {
                u += m.sd.vcol(i, j, k) * cgauss(&mut r);
            }
        }
        let thr = 1e-10 * u.norm();
        for i in 0..m.sd.p() {
            let norms: Vec<f64> = (0..m.fam.ascent(i)).map(|l| (m.fam.get(i, l).unwrap() * &u).norm()).collect();
            for l in 1..norms.len() {
                if norms[l - 1] < thr {
                    prop_assert!(norms[l] < thr);
                }
            }
        }
    }

    #[test]
    fn expm_matches_oracle(seed in any::<u64>(), t in 0.0f64..5.0) {
        let mut r = rng(seed);
        let m = random_model(&mut r, 10);
        prop_assert!(mat_rel(&expm_jordan(&m, t).unwrap(), &expm_oracle(&m.sd.a, t)) <= 1e-10);
    }

    #[test]
    fn matrix_form_bound(seed in any::<u64>(), t in 0.1f64..10.0) {
        let mut r = rng(seed);
        let m = random_model(&mut r, 6);
        let f = asymptotic_matrix(&m, NormConfig::two());
        prop_assert!(f.deviation(t) <= f.precision(t) + 1e-12);
    }

    #[test]
    fn condition_numbers_are_scale_invariant(seed in any::<u64>(), k in 0.1f64..10.0, t in 0.0f64..3.0) {
        let mut r = rng(seed);
        let m = random_model(&mut r, 6);
        let y = random_cvec(&mut r, m.n());
        let a = k_exact(&m, t, NormConfig::two(), &y, Some(&y)).unwrap();
        let b = k_exact(&m, t, NormConfig::two(), &(&y * c(k, -k)), Some(&(&y * c(0.0, k)))).unwrap();
        prop_assert!((a.ln_init - b.ln_init).abs() < 1e-13);
        prop_assert!((a.ln_dir.unwrap() - b.ln_dir.unwrap()).abs() < 1e-13);
        prop_assert!(a.ln_dir.unwrap().abs() < 1e-13);
        let ai = k_inf_initial(&m, t.max(0.1), NormConfig::two(), &y).unwrap();
        let bi = k_inf_initial(&m, t.max(0.1), NormConfig::two(), &(&y * c(k, 0.0))).unwrap();
        prop_assert!((ai.ln_value - bi.ln_value).abs() < 1e-12);
    }

    #[test]
    fn real_row_norm_is_at_most_complex(seed in any::<u64>(), p in 0usize..3) {
        let p = [NormP::One, NormP::Two, NormP::Inf][p];
        let mut r = rng(seed);
        let b = random_cvec(&mut r, 5);
        prop_assert!(real_induced_row_norm(&b, p) <= row_vector_norm(&b, NormConfig::new(p, Semantics::Complex)) * (1.0 + 1e-14));
    }

    #[test]
    fn vw_bracket(v in 0.0f64..0.95, w in 0.0f64..0.95, x in -PI..PI, a in -PI..PI) {
        let f = VwFunctions::new(v, w).unwrap();
        prop_assert!(f.f_max(x) >= f.f(a, x) - 1e-12);
        prop_assert!(f.f_min(x) <= f.f(a, x) + 1e-12);
        let e = f.extremes();
        prop_assert!(e.min_fmin <= f.f_min(x) + 1e-12 && f.f_max(x) <= e.max_fmax + 1e-12);
        prop_assert!(f.f_min(x) <= e.max_fmin + 1e-12 && f.f_max(x) >= e.min_fmax - 1e-12);
        let u = f.u(x);
        if u.norm() > 1e-12 {
            prop_assert!((v * w * x.sin()).abs() / u.norm() < 1.0);
        }
    }

    #[test]
    fn h_bounds(v in 0.05f64..0.9, w in 0.05f64..0.9, beta in 0.0f64..PI) {
        let h = HFunction::new(v, w).unwrap();
        let (_, mx) = h.h_max(beta);
        let (_, mn) = h.h_min(beta);
        for k in 0..64 {
            let x = k as f64 * TAU / 64.0;
            prop_assert!(h.h(x, beta) <= mx * (1.0 + 1e-12) && h.h(x, beta) >= mn * (1.0 - 1e-12));
        }
    }

    #[test]
    fn generic_shape_in_unit_interval(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = generic_real(&mut r, &[(1.0, 1.0), (0.0, 0.0), (-1.0, 2.0)], 5);
        for g in extract_all(&m, NormConfig::two()).unwrap().groups {
            if let Some(s) = g.shape {
                prop_assert!(s.v < 1.0 - 1e-12 && s.w < 1.0 - 1e-12);
                prop_assert!((s.sigma * s.sigma + s.mu * s.mu - 1.0).abs() < 1e-14);
            }
        }
    }
}

use rand::Rng;

#[test]
fn identity_matrix_has_unit_projector() {
    let m = model(
        condode::jcf::JordanSpec::new(vec![condode::jcf::Eigen::new(c(0.0, 0.0), vec![1, 1, 1])]).unwrap(),
        CMat::identity(3, 3),
    );
    assert!((m.fam.get(0, 0).unwrap() - CMat::identity(3, 3)).norm() < 1e-15);
}
