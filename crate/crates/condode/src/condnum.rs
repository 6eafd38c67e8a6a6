//! Exact and asymptotic condition numbers of `y0 -> exp(tA) y0`.
//!
//! Every quantity is assembled from logarithms of norms so that exponential
//! growth in `t` never overflows; `value()` exponentiates on request.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::expm::{eps_matrix, eps_matrix_neg, eps_vector_with, expm_scaled};
use crate::linalg::{ln_factorial, ln_pow, CVec, C64};
use crate::norms::{induced_matrix_norm, normalize, vector_norm, NormConfig, NormP, Semantics};
use crate::partition::{dominance_profile, q_jl, q_jl_apply, restricted_inverse_norm, DominanceProfile};
use crate::Model;

/// Exact condition numbers at one time, stored as natural logs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactCond {
    pub ln_dir: Option<f64>,
    pub ln_init: f64,
    pub ln_glob: f64,
}

impl ExactCond {
    pub fn dir(&self) -> Option<f64> {
        self.ln_dir.map(f64::exp)
    }
    pub fn init(&self) -> f64 {
        self.ln_init.exp()
    }
    pub fn glob(&self) -> f64 {
        self.ln_glob.exp()
    }
}

/// An asymptotic value with its precision bound, when one is available.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymValue {
    pub ln_value: f64,
    /// Bound on `|K / K_inf - 1|`; `None` when the bound is not available
    /// (its denominator `1 - epsilon(t, y0)` is not positive, or no bound
    /// exists for this quantity).
    pub precision: Option<f64>,
}

impl AsymValue {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

fn unit(v: &CVec, n: usize, p: NormP) -> Result<CVec> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    normalize(v, p).ok_or(Error::ZeroVector)
}

fn ln_vnorm(v: &CVec, p: NormP) -> f64 {
    vector_norm(v, p).ln()
}

/// `K(t, y0, z0)`, `K(t, y0)` and `K(t)`.
pub fn k_exact(model: &Model, t: f64, cfg: NormConfig, y0: &CVec, z0: Option<&CVec>) -> Result<ExactCond> {
    let n = model.n();
    let y = unit(y0, n, cfg.p)?;
    let z = z0.map(|z| unit(z, n, cfg.p)).transpose()?;
    let (mp, sp) = expm_scaled(model, t);
    let (mm, sm) = expm_scaled(model, -t);
    let ln_ey = ln_vnorm(&(&mp * &y), cfg.p);
    let ln_ep = induced_matrix_norm(&mp, cfg).ln();
    let ln_em = induced_matrix_norm(&mm, cfg).ln();
    Ok(ExactCond {
        ln_dir: z.map(|z| ln_vnorm(&(&mp * z), cfg.p) - ln_ey),
        ln_init: ln_ep - ln_ey,
        ln_glob: ln_ep + sp + ln_em + sm,
    })
}

fn ln_q_vec(model: &Model, prof: &DominanceProfile, t: f64, u: &CVec, p: NormP) -> f64 {
    ln_vnorm(&q_jl_apply(model, prof.j_star, prof.l_star, t, u).expect("valid indices"), p)
}

fn ln_q1(model: &Model, t: f64, cfg: NormConfig) -> f64 {
    let l1 = model.part.groups[0].l_max;
    induced_matrix_norm(&q_jl(model, 0, l1, t).expect("valid indices"), cfg).ln()
}

fn combine(eps_a: f64, eps_y: f64) -> Option<f64> {
    (eps_y < 1.0).then(|| (eps_a + eps_y) / (1.0 - eps_y))
}

/// `K_inf(t, y0, z0)`.
pub fn k_inf_directional(model: &Model, t: f64, cfg: NormConfig, y0: &CVec, z0: &CVec) -> Result<AsymValue> {
    let n = model.n();
    let (y, z) = (unit(y0, n, cfg.p)?, unit(z0, n, cfg.p)?);
    let py = dominance_profile(&model.sd, &model.part, &y, &model.tol)?;
    let pz = dominance_profile(&model.sd, &model.part, &z, &model.tol)?;
    let (r1, r2) = (model.part.groups[py.j_star].r, model.part.groups[pz.j_star].r);
    let ln_value = ln_factorial(py.l_star) - ln_factorial(pz.l_star)
        + (r2 - r1) * t
        + ln_pow(t, pz.l_star as i64 - py.l_star as i64)
        + ln_q_vec(model, &pz, t, &z, cfg.p)
        - ln_q_vec(model, &py, t, &y, cfg.p);
    let ey = eps_vector_with(model, t, cfg, &y, &py);
    let ez = eps_vector_with(model, t, cfg, &z, &pz);
    Ok(AsymValue { ln_value, precision: combine(ez, ey) })
}

/// `K_inf(t, y0)`.
pub fn k_inf_initial(model: &Model, t: f64, cfg: NormConfig, y0: &CVec) -> Result<AsymValue> {
    let y = unit(y0, model.n(), cfg.p)?;
    let py = dominance_profile(&model.sd, &model.part, &y, &model.tol)?;
    let g1 = &model.part.groups[0];
    let ln_value = ln_factorial(py.l_star) - ln_factorial(g1.l_max)
        + (g1.r - model.part.groups[py.j_star].r) * t
        + ln_pow(t, g1.l_max as i64 - py.l_star as i64)
        + ln_q1(model, t, cfg)
        - ln_q_vec(model, &py, t, &y, cfg.p);
    let ey = eps_vector_with(model, t, cfg, &y, &py);
    Ok(AsymValue { ln_value, precision: combine(eps_matrix(model, t, cfg), ey) })
}

/// `K_inf^+(t)`, the asymptotic form of `||exp(tA)|| ||exp(-tA)||`.
pub fn k_inf_global_plus(model: &Model, t: f64, cfg: NormConfig) -> Result<AsymValue> {
    let (g1, gq) = (&model.part.groups[0], model.part.last());
    let q = model.part.q();
    let nq = induced_matrix_norm(&q_jl(model, q - 1, gq.l_max, -t)?, cfg);
    let ln_value = -ln_factorial(g1.l_max) - ln_factorial(gq.l_max)
        + (g1.r - gq.r) * t
        + ln_pow(t, (g1.l_max + gq.l_max) as i64)
        + ln_q1(model, t, cfg)
        + nq.ln();
    let (e, en) = (eps_matrix(model, t, cfg), eps_matrix_neg(model, t, cfg));
    Ok(AsymValue { ln_value, precision: Some(e + en + e * en) })
}

/// `K_inf(t)`, the global asymptotic condition number built with the
/// restricted inverse of the leftmost eigenvector part.
pub fn k_inf_global(model: &Model, t: f64, cfg: NormConfig) -> Result<AsymValue> {
    k_inf_global_exec(model, t, cfg, Exec::default())
}

pub fn k_inf_global_exec(model: &Model, t: f64, cfg: NormConfig, exec: Exec) -> Result<AsymValue> {
    let g1 = &model.part.groups[0];
    let (rinv, _) = restricted_inverse_norm(model, model.part.q() - 1, t, cfg, exec)?;
    let ln_value = -ln_factorial(g1.l_max)
        + (g1.r - model.part.last().r) * t
        + ln_pow(t, g1.l_max as i64)
        + ln_q1(model, t, cfg)
        + rinv.ln();
    Ok(AsymValue { ln_value, precision: None })
}

/// `K_inf(t, y0, z0) / K_inf(t, y0)`, which does not depend on `y0`.
pub fn worst_ratio_direction(model: &Model, t: f64, cfg: NormConfig, z0: &CVec) -> Result<AsymValue> {
    let z = unit(z0, model.n(), cfg.p)?;
    let pz = dominance_profile(&model.sd, &model.part, &z, &model.tol)?;
    let g1 = &model.part.groups[0];
    let ln_value = ln_factorial(g1.l_max) - ln_factorial(pz.l_star)
        + (model.part.groups[pz.j_star].r - g1.r) * t
        + ln_pow(t, pz.l_star as i64 - g1.l_max as i64)
        + ln_q_vec(model, &pz, t, &z, cfg.p)
        - ln_q1(model, t, cfg);
    Ok(AsymValue { ln_value, precision: None })
}

/// `K_inf(t, y0) / K_inf(t)`.
pub fn worst_ratio_initial(model: &Model, t: f64, cfg: NormConfig, y0: &CVec) -> Result<AsymValue> {
    let y = unit(y0, model.n(), cfg.p)?;
    let py = dominance_profile(&model.sd, &model.part, &y, &model.tol)?;
    let (rinv, _) = restricted_inverse_norm(model, model.part.q() - 1, t, cfg, Exec::default())?;
    let ln_value = ln_factorial(py.l_star)
        + (model.part.last().r - model.part.groups[py.j_star].r) * t
        - ln_pow(t, py.l_star as i64)
        - ln_q_vec(model, &py, t, &y, cfg.p)
        - rinv.ln();
    Ok(AsymValue { ln_value, precision: None })
}

/// A unit `z0` with `||Q_{1 L_1} z0|| = ||Q_{1 L_1}||` when the rightmost
/// group is a single real eigenvalue, so `Q_{1 L_1} = P_{1 L_1}` is constant
/// and the directional and initial-value asymptotic forms coincide for all t.
pub fn witness_direction(model: &Model, cfg: NormConfig) -> Result<CVec> {
    let g1 = &model.part.groups[0];
    if g1.members.len() != 1 || model.sd.lambda(g1.members[0]).im != 0.0 {
        return Err(Error::GenericityViolated("rightmost group is not a single real eigenvalue".into()));
    }
    let p = q_jl(model, 0, g1.l_max, 0.0)?;
    let n = model.n();
    let z = match cfg.p {
        NormP::Two => {
            let m = match cfg.semantics {
                Semantics::Complex => p.clone(),
                Semantics::Real => {
                    let re = p.map(|x| x.re);
                    let im = p.map(|x| x.im);
                    let st = nalgebra::DMatrix::from_fn(2 * n, n, |r, k| if r < n { re[(r, k)] } else { im[(r - n, k)] });
                    crate::linalg::to_complex(&st)
                }
            };
            let svd = m.svd(false, true);
            let vt = svd.v_t.expect("right singular vectors requested");
            let top = (0..svd.singular_values.len())
                .max_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
                .unwrap_or(0);
            vt.row(top).transpose().map(|x| x.conj())
        }
        NormP::One => {
            let col = (0..n)
                .max_by(|&a, &b| p.column(a).iter().map(|z| z.norm()).sum::<f64>().total_cmp(&p.column(b).iter().map(|z| z.norm()).sum::<f64>()))
                .unwrap_or(0);
            let mut e = CVec::zeros(n);
            e[col] = C64::new(1.0, 0.0);
            e
        }
        NormP::Inf => {
            let row = (0..n)
                .max_by(|&a, &b| p.row(a).iter().map(|z| z.norm()).sum::<f64>().total_cmp(&p.row(b).iter().map(|z| z.norm()).sum::<f64>()))
                .unwrap_or(0);
            CVec::from_fn(n, |k, _| {
                let x = p[(row, k)];
                match cfg.semantics {
                    Semantics::Real => C64::new(if x.re >= 0.0 { 1.0 } else { -1.0 }, 0.0),
                    Semantics::Complex if x.norm() > 0.0 => x.conj() / x.norm(),
                    Semantics::Complex => C64::new(1.0, 0.0),
                }
            })
        }
    };
    normalize(&z, cfg.p).ok_or(Error::ZeroVector)
}

/// Largest `K(t, y0, z0)` over `samples` pseudo-random unit `z0` (real ones
/// under real semantics), drawn from a fixed seed.
pub fn sample_worst_direction(model: &Model, t: f64, cfg: NormConfig, y0: &CVec, samples: usize, seed: u64, exec: Exec) -> Result<f64> {
    let n = model.n();
    let y = unit(y0, n, cfg.p)?;
    let (mp, _) = expm_scaled(model, t);
    let den = vector_norm(&(&mp * &y), cfg.p);
    let real = cfg.semantics == Semantics::Real;
    let chunks = 32usize;
    let per = samples.div_ceil(chunks);
    let best = exec.max_range(chunks, |ch| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ch as u64);
        let mut top = 0.0f64;
        for _ in 0..per {
            let z = CVec::from_fn(n, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = if real { 0.0 } else { StandardNormal.sample(&mut rng) };
                C64::new(re, im)
            });
            let z = normalize(&z, cfg.p).expect("gaussian sample is nonzero");
            top = top.max(vector_norm(&(&mp * &z), cfg.p) / den);
        }
        top
    });
    Ok(best)
}

/// One row of a condition-number curve. With `log_scale` every value is a
/// natural logarithm.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionSample {
    pub t: f64,
    pub k_dir: Option<f64>,
    pub k_init: Option<f64>,
    pub k_glob: Option<f64>,
    pub kinf_dir: Option<f64>,
    pub kinf_init: Option<f64>,
    pub kinf_glob_plus: Option<f64>,
    pub kinf_glob: Option<f64>,
    pub eps_t: Option<f64>,
    pub eps_t_y0: Option<f64>,
    pub log_scale: bool,
}

#[derive(Clone, Debug)]
pub struct CurveTable {
    pub norm: NormConfig,
    pub y0: Option<CVec>,
    pub z0: Option<CVec>,
    pub samples: Vec<ConditionSample>,
}

fn store(ln: f64, log_scale: bool) -> f64 {
    if log_scale { ln } else { ln.exp() }
}

fn sample(model: &Model, t: f64, cfg: NormConfig, y0: Option<&CVec>, z0: Option<&CVec>, log_scale: bool) -> Result<ConditionSample> {
    let s = |ln: f64| store(ln, log_scale);
    let (mp, sp) = expm_scaled(model, t);
    let (mm, sm) = expm_scaled(model, -t);
    let ln_glob = induced_matrix_norm(&mp, cfg).ln() + sp + induced_matrix_norm(&mm, cfg).ln() + sm;
    let mut row = ConditionSample {
        t,
        k_dir: None,
        k_init: None,
        k_glob: Some(s(ln_glob)),
        kinf_dir: None,
        kinf_init: None,
        kinf_glob_plus: Some(s(k_inf_global_plus(model, t, cfg)?.ln_value)),
        kinf_glob: Some(s(k_inf_global_exec(model, t, cfg, Exec::Sequential)?.ln_value)),
        eps_t: Some(s(eps_matrix(model, t, cfg).ln())),
        eps_t_y0: None,
        log_scale,
    };
    if let Some(y0) = y0 {
        let ex = k_exact(model, t, cfg, y0, z0)?;
        row.k_init = Some(s(ex.ln_init));
        row.k_dir = ex.ln_dir.map(s);
        row.kinf_init = Some(s(k_inf_initial(model, t, cfg, y0)?.ln_value));
        if let Some(z0) = z0 {
            row.kinf_dir = Some(s(k_inf_directional(model, t, cfg, y0, z0)?.ln_value));
        }
        let y = unit(y0, model.n(), cfg.p)?;
        let py = dominance_profile(&model.sd, &model.part, &y, &model.tol)?;
        row.eps_t_y0 = Some(s(eps_vector_with(model, t, cfg, &y, &py).ln()));
    }
    Ok(row)
}

/// Condition numbers over a grid of times, evaluated independently per time
/// and returned in grid order.
pub fn curve(model: &Model, cfg: NormConfig, ts: &[f64], y0: Option<&CVec>, z0: Option<&CVec>, log_scale: bool, exec: Exec) -> Result<CurveTable> {
    if ts.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::ParameterOutOfRange("time grid must be strictly increasing".into()));
    }
    if z0.is_some() && y0.is_none() {
        return Err(Error::ParameterOutOfRange("a direction z0 needs an initial value y0".into()));
    }
    let rows = exec.map(ts, |&t| sample(model, t, cfg, y0, z0, log_scale));
    let samples = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CurveTable { norm: cfg, y0: y0.cloned(), z0: z0.cloned(), samples })
}

/// Whether a curve should store logarithms: the spectrum spans more than
/// one real part, so the condition numbers grow exponentially.
pub fn prefers_log_scale(model: &Model) -> bool {
    model.part.q() > 1
}

