//! `exp(tA)` from the Jordan expansion, an independent Padé oracle, and the
//! long-time asymptotic forms with their precision bounds.

use crate::error::{Error, Result};
use crate::linalg::{factorial, ln_factorial, ln_pow, norm_one_mat, CMat, CVec, C64};
use crate::norms::{induced_matrix_norm, vector_norm, NormConfig};
use crate::partition::{dominance_profile, q_jl, q_jl_apply, DominanceProfile};
use crate::Model;

/// `exp(tA) = sum_i exp(lambda_i t) sum_{l < m_i} t^l/l! P_il`.
pub fn expm_jordan(model: &Model, t: f64) -> Result<CMat> {
    let rmax = model.sd.spec.eigs.iter().map(|e| e.lambda.re.abs()).fold(0.0, f64::max);
    let exponent = rmax * t.abs();
    if exponent > model.tol.overflow_limit {
        return Err(Error::OverflowRisk { exponent, limit: model.tol.overflow_limit });
    }
    let (m, s) = expm_scaled(model, t);
    Ok(m * C64::new(s.exp(), 0.0))
}

/// `(M, s)` with `exp(tA) = exp(s) M` and `s = max_i Re(lambda_i) t`, so `M`
/// never overflows.
pub fn expm_scaled(model: &Model, t: f64) -> (CMat, f64) {
    let s = model
        .sd
        .spec
        .eigs
        .iter()
        .map(|e| e.lambda.re * t)
        .fold(f64::NEG_INFINITY, f64::max);
    let n = model.n();
    let mut out = CMat::zeros(n, n);
    for (i, row) in model.fam.p.iter().enumerate() {
        let e = (model.sd.lambda(i) * t - C64::new(s, 0.0)).exp();
        let mut tl = 1.0;
        for (l, p) in row.iter().enumerate() {
            if l > 0 {
                tl *= t / l as f64;
            }
            out += p * (e * tl);
        }
    }
    (out, s)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Scaling and squaring with the [13/13] Padé approximant, independent of any
/// spectral information.
pub fn expm_oracle(a: &CMat, t: f64) -> CMat {
    let n = a.nrows();
    let at = a * C64::new(t, 0.0);
    let nrm = norm_one_mat(&at);
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    let x = at / C64::new(2f64.powi(s), 0.0);
    let id = CMat::identity(n, n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let u_inner = &x6 * (&x6 * b(13) + &x4 * b(11) + &x2 * b(9)) + &x6 * b(7) + &x4 * b(5) + &x2 * b(3) + &id * b(1);
    let u = &x * u_inner;
    let v = &x6 * (&x6 * b(12) + &x4 * b(10) + &x2 * b(8)) + &x6 * b(6) + &x4 * b(4) + &x2 * b(2) + &id * b(0);
    let mut r = (&v - &u).lu().solve(&(&v + &u)).expect("Pade denominator is nonsingular after scaling");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Sum of `(L!/l!) t^{l-L} exp((r-r_lead) t) N / N_lead` over the given
/// `(r, l, N)` terms, evaluated in logs.
fn eps_sum(t: f64, r_lead: f64, l_lead: usize, n_lead: f64, terms: &[(f64, usize, f64)]) -> f64 {
    let base = ln_factorial(l_lead) - n_lead.ln();
    terms
        .iter()
        .filter(|(_, _, nrm)| *nrm > 0.0)
        .map(|&(r, l, nrm)| {
            let ln = base - ln_factorial(l) + ln_pow(t, l as i64 - l_lead as i64) + (r - r_lead) * t + nrm.ln();
            ln.exp()
        })
        .sum()
}

/// `epsilon(t)`: precision of the matrix asymptotic form.
pub fn eps_matrix(model: &Model, t: f64, cfg: NormConfig) -> f64 {
    eps_matrix_ordered(model, t, cfg, false)
}

/// `epsilon(t)` of `-A`, computed from `A` by `Q_jl(t,-A) = (-1)^l Q_{q+1-j,l}(-t)`.
pub fn eps_matrix_neg(model: &Model, t: f64, cfg: NormConfig) -> f64 {
    eps_matrix_ordered(model, t, cfg, true)
}

fn eps_matrix_ordered(model: &Model, t: f64, cfg: NormConfig, reversed: bool) -> f64 {
    let q = model.part.q();
    let (group, tq, sign) = if reversed { (q - 1, -t, -1.0) } else { (0, t, 1.0) };
    let order: Vec<usize> = if reversed { (0..q).rev().collect() } else { (0..q).collect() };
    let lead = &model.part.groups[group];
    let r_lead = sign * lead.r;
    let norm = |j: usize, l: usize| induced_matrix_norm(&q_jl(model, j, l, tq).expect("valid indices"), cfg);
    let n_lead = norm(group, lead.l_max);
    let mut terms = Vec::new();
    for l in 0..lead.l_max {
        terms.push((r_lead, l, norm(group, l)));
    }
    for &j in &order[1..] {
        let g = &model.part.groups[j];
        for l in 0..=g.l_max {
            terms.push((sign * g.r, l, norm(j, l)));
        }
    }
    eps_sum(t, r_lead, lead.l_max, n_lead, &terms)
}

/// `epsilon(t, u)`: precision of the vector asymptotic form for `u`.
pub fn eps_vector(model: &Model, t: f64, cfg: NormConfig, u: &CVec) -> Result<f64> {
    let prof = dominance_profile(&model.sd, &model.part, u, &model.tol)?;
    Ok(eps_vector_with(model, t, cfg, u, &prof))
}

pub(crate) fn eps_vector_with(model: &Model, t: f64, cfg: NormConfig, u: &CVec, prof: &DominanceProfile) -> f64 {
    let norm = |j: usize, l: usize| vector_norm(&q_jl_apply(model, j, l, t, u).expect("valid indices"), cfg.p);
    let js = prof.j_star;
    let r_lead = model.part.groups[js].r;
    let n_lead = norm(js, prof.l_star);
    let mut terms = Vec::new();
    for l in 0..prof.l_star {
        terms.push((r_lead, l, norm(js, l)));
    }
    for j in (js + 1)..model.part.q() {
        if let Some(lj) = prof.per_group[j] {
            for l in 0..=lj {
                terms.push((model.part.groups[j].r, l, norm(j, l)));
            }
        }
    }
    eps_sum(t, r_lead, prof.l_star, n_lead, &terms)
}

/// The dominant term of `exp(tA)` or of `exp(tA) u`:
/// `exp(r t) t^L / L! carrier(t)` with carrier `Q_{1 L_1}(t)` or
/// `Q_{j(u) L(u)}(t) u`.
#[derive(Clone, Debug)]
pub struct AsymptoticForm<'a> {
    model: &'a Model,
    cfg: NormConfig,
    /// Group whose `Q` carries the form.
    pub group: usize,
    pub r: f64,
    pub l: usize,
    u: Option<CVec>,
    profile: Option<DominanceProfile>,
}

pub fn asymptotic_matrix(model: &Model, cfg: NormConfig) -> AsymptoticForm<'_> {
    let g = &model.part.groups[0];
    AsymptoticForm { model, cfg, group: 0, r: g.r, l: g.l_max, u: None, profile: None }
}

pub fn asymptotic_vector<'a>(model: &'a Model, cfg: NormConfig, u: &CVec) -> Result<AsymptoticForm<'a>> {
    let prof = dominance_profile(&model.sd, &model.part, u, &model.tol)?;
    Ok(AsymptoticForm {
        model,
        cfg,
        group: prof.j_star,
        r: model.part.groups[prof.j_star].r,
        l: prof.l_star,
        u: Some(u.clone()),
        profile: Some(prof),
    })
}

impl AsymptoticForm<'_> {
    pub fn is_vector(&self) -> bool {
        self.u.is_some()
    }

    /// `Q(t)` or `Q(t) u` as an n-by-n or n-by-1 matrix.
    pub fn carrier(&self, t: f64) -> CMat {
        let q = q_jl(self.model, self.group, self.l, t).expect("valid indices");
        match &self.u {
            Some(u) => CMat::from_column_slice(u.len(), 1, (q * u).as_slice()),
            None => q,
        }
    }

    fn norm(&self, m: &CMat) -> f64 {
        if self.is_vector() {
            vector_norm(&m.column(0).into_owned(), self.cfg.p)
        } else {
            induced_matrix_norm(m, self.cfg)
        }
    }

    /// `ln(exp(r t) t^L / L!)`.
    pub fn ln_scale(&self, t: f64) -> f64 {
        self.r * t + ln_pow(t, self.l as i64) - ln_factorial(self.l)
    }

    pub fn value(&self, t: f64) -> CMat {
        let k = (self.r * t).exp() * t.powi(self.l as i32) / factorial(self.l);
        self.carrier(t) * C64::new(k, 0.0)
    }

    /// `ln ||value(t)||`.
    pub fn ln_norm(&self, t: f64) -> f64 {
        self.ln_scale(t) + self.norm(&self.carrier(t)).ln()
    }

    pub fn precision(&self, t: f64) -> f64 {
        match (&self.u, &self.profile) {
            (Some(u), Some(p)) => eps_vector_with(self.model, t, self.cfg, u, p),
            _ => eps_matrix(self.model, t, self.cfg),
        }
    }

    /// Measured `||exp(tA)[u] - value(t)|| / ||value(t)||`, computed with
    /// both sides divided by `exp(r t)`.
    pub fn deviation(&self, t: f64) -> f64 {
        let (m, s) = expm_scaled(self.model, t);
        let k = (s - self.r * t).exp();
        let exact = match &self.u {
            Some(u) => CMat::from_column_slice(u.len(), 1, (&m * u).as_slice()) * C64::new(k, 0.0),
            None => m * C64::new(k, 0.0),
        };
        let form = self.carrier(t) * C64::new(t.powi(self.l as i32) / factorial(self.l), 0.0);
        self.norm(&(exact - &form)) / self.norm(&form)
    }
}
