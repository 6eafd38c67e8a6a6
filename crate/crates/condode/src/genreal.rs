//! Real matrices whose groups are each one simple real eigenvalue or one
//! simple conjugate pair.
//!
//! For such a group `Q_j0(t) = f_j * (v_hat w_hat)` in the real case and
//! `2 f_j Re(exp(i omega t) v_hat w_hat)` in the complex case, so every norm
//! reduces to the shape of the unit vectors `v_hat`, `w_hat`. In the 2-norm
//! that shape is captured by `V = |v_hat^T v_hat|` and `W = |w_hat w_hat^T|`
//! together with a few angles, and the extremes of the oscillating factors
//! have closed forms.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{CVec, C64};
use crate::norms::{induced_matrix_norm, row_vector_norm, vector_norm, NormConfig, NormP};
use crate::Model;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Real,
    Complex,
}

/// Shape of a conjugate pair, from the 2-norm normalized `v`, `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairShape {
    /// `V = |v_hat^T v_hat|`.
    pub v: f64,
    /// `arg(v_hat^T v_hat)`.
    pub delta: f64,
    /// `W = |w_hat w_hat^T|`.
    pub w: f64,
    /// Angle of the major semi-axis of the ellipse `{w_hat u : u real unit}`.
    pub theta: f64,
    /// Semi-axis lengths `sqrt((1 +- W)/2)`.
    pub sigma: f64,
    pub mu: f64,
    /// `arg v_hat_k` and `arg w_hat_l`.
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Right singular vectors of `R = [Re w_hat; Im w_hat]`.
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    /// `w` scaled to unit 2-norm, used for ellipse geometry.
    pub w2: CVec,
}

#[derive(Clone, Debug)]
pub struct GroupParams {
    pub group: usize,
    pub kind: Kind,
    /// Eigenvalue with nonnegative imaginary part.
    pub lambda: C64,
    pub omega: f64,
    pub r: f64,
    pub v_hat: CVec,
    /// Entries of the unit row vector `w_hat`.
    pub w_hat: CVec,
    /// `f_j = ||w|| ||v||`.
    pub f: f64,
    pub shape: Option<PairShape>,
}

#[derive(Clone, Debug)]
pub struct GenericRealParams {
    pub cfg: NormConfig,
    pub groups: Vec<GroupParams>,
}

impl GenericRealParams {
    /// `Q_1 = (V_1 / (2 W_1)) (1 + W_1)` for a complex leading group.
    pub fn q1(&self) -> Option<f64> {
        let s = self.groups.first()?.shape.as_ref()?;
        (s.w > 0.0).then(|| s.v / (2.0 * s.w) * (1.0 + s.w))
    }
}

fn real_vec(u: &CVec) -> Result<()> {
    if u.iter().any(|z| z.im != 0.0) {
        return Err(Error::ParameterOutOfRange("vector must be real".into()));
    }
    Ok(())
}

fn shape_of(v: &CVec, w: &CVec) -> PairShape {
    let n = v.len();
    let v2 = v / C64::new(vector_norm(v, NormP::Two), 0.0);
    let w2 = w / C64::new(vector_norm(w, NormP::Two), 0.0);
    let vv: C64 = v2.iter().map(|z| z * z).sum();
    let ww: C64 = w2.iter().map(|z| z * z).sum();
    let (vm, wm) = (vv.norm().min(1.0), ww.norm().min(1.0));
    let theta = if wm > 0.0 { 0.5 * ww.arg() } else { 0.0 };
    let sigma = ((1.0 + wm) / 2.0).sqrt();
    let mu = ((1.0 - wm) / 2.0).sqrt();
    let (ct, st) = (theta.cos(), theta.sin());
    // R^T a / s for the unit left singular vectors a = (cos, sin) and (-sin, cos).
    let y1: Vec<f64> = (0..n).map(|k| (w2[k].re * ct + w2[k].im * st) / sigma).collect();
    let y2: Vec<f64> = if mu > 0.0 {
        (0..n).map(|k| (-w2[k].re * st + w2[k].im * ct) / mu).collect()
    } else {
        vec![0.0; n]
    };
    PairShape {
        v: vm,
        delta: vv.arg(),
        w: wm,
        theta,
        sigma,
        mu,
        alpha: v2.iter().map(|z| z.arg()).collect(),
        beta: w2.iter().map(|z| z.arg()).collect(),
        y1,
        y2,
        w2,
    }
}

/// Parameters of group `j`.
pub fn extract_generic(model: &Model, j: usize, cfg: NormConfig) -> Result<GroupParams> {
    let g = model.part.group(j)?;
    if !model.sd.real_paired {
        return Err(Error::GenericityViolated("decomposition is not real paired".into()));
    }
    let simple = |i: usize| model.sd.spec.eigs[i].blocks == [1];
    let (i, kind) = match g.members.as_slice() {
        [i] if model.sd.lambda(*i).im == 0.0 && simple(*i) => (*i, Kind::Real),
        [i, k] if simple(*i) && simple(*k) && model.sd.lambda(*i) == model.sd.lambda(*k).conj() => {
            (if model.sd.lambda(*i).im > 0.0 { *i } else { *k }, Kind::Complex)
        }
        _ => {
            return Err(Error::GenericityViolated(format!(
                "group {j} is neither one simple real eigenvalue nor one simple conjugate pair"
            )))
        }
    };
    let v = model.sd.vcol(i, 0, 0);
    let w = model.sd.wrow(i, 0, 0);
    let (nv, nw) = (vector_norm(&v, cfg.p), row_vector_norm(&w, NormConfig::new(cfg.p, crate::Semantics::Complex)));
    let lambda = model.sd.lambda(i);
    Ok(GroupParams {
        group: j,
        kind,
        lambda,
        omega: lambda.im,
        r: lambda.re,
        v_hat: &v / C64::new(nv, 0.0),
        w_hat: &w / C64::new(nw, 0.0),
        f: nv * nw,
        shape: (kind == Kind::Complex).then(|| shape_of(&v, &w)),
    })
}

/// Parameters of every group; fails unless the whole spectrum is generic.
pub fn extract_all(model: &Model, cfg: NormConfig) -> Result<GenericRealParams> {
    let groups = (0..model.part.q()).map(|j| extract_generic(model, j, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(GenericRealParams { cfg, groups })
}

impl GroupParams {
    /// `w_hat u`.
    pub fn project(&self, u: &CVec) -> C64 {
        self.w_hat.iter().zip(u.iter()).map(|(a, b)| a * b).sum()
    }

    /// `gamma(u) = arg(w_hat u)`.
    pub fn gamma(&self, u: &CVec) -> f64 {
        self.project(u).arg()
    }

    fn pair(&self) -> Result<&PairShape> {
        self.shape.as_ref().ok_or_else(|| Error::GenericityViolated(format!("group {} is real", self.group)))
    }

    /// `x_j(t) = 2 (omega t + theta) + delta`.
    pub fn x_of_t(&self, t: f64) -> Result<f64> {
        let s = self.pair()?;
        Ok(2.0 * (self.omega * t + s.theta) + s.delta)
    }

    /// `Delta_j(u) = 2 (gamma(u) - theta)`.
    pub fn delta_of(&self, u: &CVec) -> Result<f64> {
        Ok(2.0 * (self.gamma(u) - self.pair()?.theta))
    }

    /// The real vector `Theta_hat(t, u)` with entries
    /// `|v_hat_k| cos(omega t + alpha_k + gamma(u))`.
    pub fn theta_vector(&self, t: f64, u: &CVec) -> CVec {
        let rot = C64::from_polar(1.0, self.omega * t + self.gamma(u));
        self.v_hat.map(|z| C64::new((rot * z).re, 0.0))
    }

    /// The real matrix `Theta_hat(t) = Re(exp(i omega t) v_hat w_hat)`.
    pub fn theta_matrix(&self, t: f64) -> crate::CMat {
        let rot = C64::from_polar(1.0, self.omega * t);
        let m = (&self.v_hat * rot) * self.w_hat.transpose();
        m.map(|z| C64::new(z.re, 0.0))
    }

    /// `||Theta_hat(t, u)||_2 = sqrt((1 + V cos(x(t) + Delta(u))) / 2)`.
    pub fn theta_vector_norm2(&self, t: f64, u: &CVec) -> Result<f64> {
        let s = self.pair()?;
        let x = self.x_of_t(t)? + self.delta_of(u)?;
        Ok(((1.0 + s.v * x.cos()) / 2.0).max(0.0).sqrt())
    }

    /// `g_j(t, u)`: 1 for a real group, `2 ||Theta_hat(t, u)||` otherwise.
    pub fn g_vector(&self, t: f64, u: &CVec, cfg: NormConfig) -> Result<f64> {
        real_vec(u)?;
        match self.kind {
            Kind::Real => Ok(1.0),
            Kind::Complex if cfg.p == NormP::Two => Ok(2.0 * self.theta_vector_norm2(t, u)?),
            Kind::Complex => Ok(2.0 * vector_norm(&self.theta_vector(t, u), cfg.p)),
        }
    }

    /// `g_j(t)`: 1 for a real group, `2 ||Theta_hat(t)||` otherwise.
    pub fn g_matrix(&self, t: f64, cfg: NormConfig) -> Result<f64> {
        match self.kind {
            Kind::Real => Ok(1.0),
            Kind::Complex if cfg.p == NormP::Two => Ok(2.0 * theta_matrix_norm2(self, t, cfg)?),
            Kind::Complex => Ok(2.0 * induced_matrix_norm(&self.theta_matrix(t), cfg)),
        }
    }

    /// Components of a real unit `u` along the right singular vectors of
    /// `R`, so that `w_hat u = sigma c e^{i theta} + mu d i e^{i theta}` up
    /// to the 2-norm scaling of `w_hat`.
    pub fn singular_components(&self, u: &CVec) -> Result<(f64, f64)> {
        let s = self.pair()?;
        real_vec(u)?;
        let c = s.y1.iter().zip(u.iter()).map(|(a, b)| a * b.re).sum();
        let d = s.y2.iter().zip(u.iter()).map(|(a, b)| a * b.re).sum();
        Ok((c, d))
    }

    /// Largest `|w_hat u|` over real unit `u` (2-norm scaling of `w_hat`).
    pub fn ellipse_sigma(&self) -> Result<f64> {
        Ok(self.pair()?.sigma)
    }

    /// Sampled `sup |w_hat u|` over real unit `u`, 2-norm scaling.
    pub fn ellipse_sup_sample(&self, samples: usize, seed: u64, exec: Exec) -> Result<f64> {
        let s = self.pair()?;
        let n = s.w2.len();
        let chunks = 32usize;
        let per = samples.div_ceil(chunks);
        Ok(exec.max_range(chunks, |ch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ch as u64);
            let mut top = 0.0f64;
            let mut u = vec![0.0; n];
            for _ in 0..per {
                u.iter_mut().for_each(|x| *x = StandardNormal.sample(&mut rng));
                let nrm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                let z: C64 = s.w2.iter().zip(&u).map(|(a, b)| a * (b / nrm)).sum();
                top = top.max(z.norm());
            }
            top
        }))
    }
}

/// `||Theta_hat(t)||_2 = sqrt(((1 - W^2)/4) f^max_{VW}(x(t)))`.
pub fn theta_matrix_norm2(gp: &GroupParams, t: f64, cfg: NormConfig) -> Result<f64> {
    if cfg.p != NormP::Two {
        return Err(Error::WrongNormConfigured);
    }
    let s = gp.pair()?;
    let fw = VwFunctions::new(s.v, s.w)?;
    Ok(((1.0 - s.w * s.w) / 4.0 * fw.f_max(gp.x_of_t(t)?)).max(0.0).sqrt())
}

/// The family `f_VW(alpha, x) = (1 + V cos(x + alpha)) / (1 - W cos alpha)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VwFunctions {
    pub v: f64,
    pub w: f64,
}

/// Extremes over `x` of `f^max` and `f^min`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VwExtremes {
    pub max_fmax: f64,
    pub min_fmax: f64,
    pub max_fmin: f64,
    pub min_fmin: f64,
}

impl VwFunctions {
    pub fn new(v: f64, w: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&v) || !(0.0..1.0).contains(&w) {
            return Err(Error::ParameterOutOfRange(format!("V = {v}, W = {w} must lie in [0, 1)")));
        }
        Ok(VwFunctions { v, w })
    }

    pub fn f(&self, alpha: f64, x: f64) -> f64 {
        (1.0 + self.v * (x + alpha).cos()) / (1.0 - self.w * alpha.cos())
    }

    /// `U(x) = V e^{ix} + W`.
    pub fn u(&self, x: f64) -> C64 {
        C64::from_polar(self.v, x) + self.w
    }

    pub fn theta_vw(&self, x: f64) -> f64 {
        self.u(x).arg()
    }

    /// `arcsin(V W sin x / |U(x)|)`, or `None` where `U(x)` vanishes and
    /// `f_VW(., x)` is identically 1.
    fn asin_part(&self, x: f64) -> Option<f64> {
        let u = self.u(x);
        let m = u.norm();
        if m <= 1e-15 * (self.v + self.w).max(f64::MIN_POSITIVE) {
            return None;
        }
        Some((self.v * self.w * x.sin() / m).clamp(-1.0, 1.0).asin())
    }

    pub fn alpha_max(&self, x: f64) -> f64 {
        self.asin_part(x).map_or(0.0, |a| a - self.theta_vw(x))
    }

    pub fn alpha_min(&self, x: f64) -> f64 {
        self.asin_part(x).map_or(0.0, |a| PI - a - self.theta_vw(x))
    }

    pub fn f_max(&self, x: f64) -> f64 {
        match self.asin_part(x) {
            Some(_) => self.f(self.alpha_max(x), x),
            None => 1.0,
        }
    }

    pub fn f_min(&self, x: f64) -> f64 {
        match self.asin_part(x) {
            Some(_) => self.f(self.alpha_min(x), x),
            None => 1.0,
        }
    }

    /// Closed-form extremes over `x`; `max f^max` and `min f^min` sit at even
    /// multiples of `pi`, the other two at odd multiples.
    pub fn extremes(&self) -> VwExtremes {
        let (v, w) = (self.v, self.w);
        let (min_fmax, max_fmin) = if v <= w {
            ((1.0 - v) / (1.0 - w), (1.0 + v) / (1.0 + w))
        } else {
            ((1.0 + v) / (1.0 + w), (1.0 - v) / (1.0 - w))
        };
        VwExtremes { max_fmax: (1.0 + v) / (1.0 - w), min_fmax, max_fmin, min_fmin: (1.0 - v) / (1.0 + w) }
    }
}

/// Oscillation scale factor and oscillating term of `K_inf = OSF * OT(t)` for
/// a leading conjugate pair.
#[derive(Clone, Debug)]
pub struct Oscillation<'a> {
    gp: &'a GroupParams,
    cfg: NormConfig,
    y: CVec,
    z: Option<CVec>,
    pub osf: f64,
}

pub fn osf_and_ot<'a>(gp: &'a GenericRealParams, y0: &CVec, z0: Option<&CVec>) -> Result<Oscillation<'a>> {
    let g1 = gp.groups.first().ok_or_else(|| Error::GenericityViolated("no groups".into()))?;
    if g1.kind != Kind::Complex {
        return Err(Error::GenericityViolated("leading group is real".into()));
    }
    let p = gp.cfg.p;
    real_vec(y0)?;
    let y = crate::norms::normalize(y0, p).ok_or(Error::ZeroVector)?;
    let py = g1.project(&y).norm();
    if py <= 1e-12 {
        return Err(Error::ZeroProjection);
    }
    let z = match z0 {
        Some(z0) => {
            real_vec(z0)?;
            let z = crate::norms::normalize(z0, p).ok_or(Error::ZeroVector)?;
            if g1.project(&z).norm() <= 1e-12 {
                return Err(Error::ZeroProjection);
            }
            Some(z)
        }
        None => None,
    };
    let osf = match &z {
        Some(z) => g1.project(z).norm() / py,
        None => 1.0 / py,
    };
    Ok(Oscillation { gp: g1, cfg: gp.cfg, y, z, osf })
}

impl Oscillation<'_> {
    /// Period `pi / omega_1` of the oscillating term.
    pub fn period(&self) -> f64 {
        PI / self.gp.omega
    }

    /// `OT(t)` from its definition as a ratio of `Theta_hat` norms.
    pub fn ot(&self, t: f64) -> f64 {
        let den = vector_norm(&self.gp.theta_vector(t, &self.y), self.cfg.p);
        let num = match &self.z {
            Some(z) => vector_norm(&self.gp.theta_vector(t, z), self.cfg.p),
            None => induced_matrix_norm(&self.gp.theta_matrix(t), self.cfg),
        };
        num / den
    }

    /// `OT(t)` from the 2-norm closed forms: `sqrt(f_{V V}(alpha, x))` in the
    /// directional case and `sqrt((1 - W^2)/2 H(x(t), Delta(y)))` otherwise.
    pub fn ot_closed(&self, t: f64) -> Result<f64> {
        if self.cfg.p != NormP::Two {
            return Err(Error::WrongNormConfigured);
        }
        let s = self.gp.pair()?;
        let x1 = self.gp.x_of_t(t)?;
        let dy = self.gp.delta_of(&self.y)?;
        match &self.z {
            Some(z) => {
                let fv = VwFunctions { v: s.v, w: s.v };
                let x = 2.0 * (self.gp.gamma(z) - self.gp.gamma(&self.y)) - PI;
                Ok(fv.f(x1 + dy + PI, x).sqrt())
            }
            None => {
                let fw = VwFunctions::new(s.v, s.w)?;
                let h = fw.f_max(x1) / (1.0 + s.v * (x1 + dy).cos());
                Ok(((1.0 - s.w * s.w) / 2.0 * h).sqrt())
            }
        }
    }

    pub fn k_inf(&self, t: f64) -> f64 {
        self.osf * self.ot(t)
    }

    /// `gamma_1(y_hat) - theta_1`, which decides where the extremes of the
    /// initial-value term are attained.
    pub fn gamma_minus_theta(&self) -> Result<f64> {
        Ok(self.gp.gamma(&self.y) - self.gp.pair()?.theta)
    }
}

/// Position of an angle relative to multiples of `pi/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleClass {
    MultipleOfPi,
    OddMultipleOfHalfPi,
    Other,
}

pub fn angle_class(a: f64) -> AngleClass {
    let tol = 1e-9;
    let r = a.rem_euclid(PI);
    if r < tol || PI - r < tol {
        AngleClass::MultipleOfPi
    } else if (r - FRAC_PI_2).abs() < tol {
        AngleClass::OddMultipleOfHalfPi
    } else {
        AngleClass::Other
    }
}

/// Extremes of the directional oscillating term over `t` and the angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectionalExtremes {
    /// Largest `max_t OT`, when `gamma(z) - gamma(y)` is an odd multiple of `pi/2`.
    pub max_max: f64,
    /// Smallest `max_t OT`, when the difference is a multiple of `pi`.
    pub min_max: f64,
    pub max_min: f64,
    pub min_min: f64,
}

pub fn ot_extremes_directional(v1: f64) -> Result<DirectionalExtremes> {
    VwFunctions::new(v1, v1)?;
    Ok(DirectionalExtremes {
        max_max: ((1.0 + v1) / (1.0 - v1)).sqrt(),
        min_max: 1.0,
        max_min: 1.0,
        min_min: ((1.0 - v1) / (1.0 + v1)).sqrt(),
    })
}

/// `(min_t OT, max_t OT)` of the directional term for given angles.
pub fn ot_directional_range(v1: f64, gamma_y: f64, gamma_z: f64) -> Result<(f64, f64)> {
    let fv = VwFunctions::new(v1, v1)?;
    let x = 2.0 * (gamma_z - gamma_y) - PI;
    Ok((fv.f_min(x).sqrt(), fv.f_max(x).sqrt()))
}

/// Extremes of the initial-value oscillating term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialExtremes {
    /// `max_y max_t OT`.
    pub max: f64,
    /// `min_y max_t OT`.
    pub min_max: f64,
    /// `max_y min_t OT`.
    pub max_min: f64,
    /// `min_y min_t OT`.
    pub min: f64,
    /// Upper bound on `min_max` when `V <= 2W/(1+W)`.
    pub min_max_bound: Option<f64>,
    /// `V = 0` or `W = 0`: the term does not depend on `y`.
    pub special_case: bool,
}

pub fn ot_extremes_initial(v1: f64, w1: f64) -> Result<InitialExtremes> {
    VwFunctions::new(v1, w1)?;
    let (v, w) = (v1, w1);
    if v == 0.0 {
        let c = ((1.0 + w) / 2.0).sqrt();
        return Ok(InitialExtremes { max: c, min_max: c, max_min: c, min: c, min_max_bound: None, special_case: true });
    }
    if w == 0.0 {
        let hi = ((1.0 + v) / (2.0 * (1.0 - v))).sqrt();
        let lo = 0.5f64.sqrt();
        return Ok(InitialExtremes { max: hi, min_max: hi, max_min: lo, min: lo, min_max_bound: None, special_case: true });
    }
    let q1 = v / (2.0 * w) * (1.0 + w);
    let first = v <= 2.0 * w / (1.0 + w);
    let min_max = if first {
        ((1.0 + w) / 2.0 * (1.0 - v * v) / (1.0 - q1 * v)).sqrt()
    } else {
        ((1.0 - w) * (1.0 + v) / (2.0 * (1.0 - v))).sqrt()
    };
    let min = if v <= w {
        ((1.0 + w) * (1.0 - v) / (2.0 * (1.0 + v))).sqrt()
    } else {
        ((1.0 - w) / 2.0).sqrt()
    };
    Ok(InitialExtremes {
        max: ((1.0 + w) * (1.0 + v) / (2.0 * (1.0 - v))).sqrt(),
        min_max,
        max_min: ((1.0 + w) / 2.0).sqrt(),
        min,
        min_max_bound: first.then(|| ((1.0 + w) * (1.0 + v) / 2.0).sqrt()),
        special_case: false,
    })
}

/// `H(x, beta) = f^max_{VW}(x) / (1 + V cos(x + beta))`, whose extremes in
/// `x` give those of the initial-value oscillating term for
/// `beta = Delta_1(y_hat)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HFunction {
    pub vw: VwFunctions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchKind {
    /// Continued from a stationary point of `H(., 0)`.
    Stationary,
    /// The family where `alpha^max(x) = beta`, on which `H = 1/(1 - W cos beta)`.
    AlphaEqualsBeta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub id: usize,
    pub kind: BranchKind,
    pub beta: Vec<f64>,
    pub x: Vec<f64>,
    pub h: Vec<f64>,
}

const H_GRID: usize = 2048;

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

impl HFunction {
    pub fn new(v1: f64, w1: f64) -> Result<Self> {
        let vw = VwFunctions::new(v1, w1)?;
        if v1 == 0.0 || w1 == 0.0 {
            return Err(Error::DegenerateParameters(format!("V = {v1}, W = {w1}: H needs both in (0, 1)")));
        }
        Ok(HFunction { vw })
    }

    pub fn h(&self, x: f64, beta: f64) -> f64 {
        self.vw.f_max(x) / (1.0 + self.vw.v * (x + beta).cos())
    }

    fn extreme(&self, beta: f64, sign: f64) -> (f64, f64) {
        let step = TAU / H_GRID as f64;
        let f = |x: f64| sign * self.h(x, beta);
        let k = (0..H_GRID).max_by(|&a, &b| f(a as f64 * step).total_cmp(&f(b as f64 * step))).unwrap_or(0);
        let x0 = k as f64 * step;
        let (x, val) = golden_max(f, x0 - step, x0 + step, 1e-11);
        (x.rem_euclid(TAU), sign * val)
    }

    /// `(argmax, H^max(beta))`.
    pub fn h_max(&self, beta: f64) -> (f64, f64) {
        self.extreme(beta, 1.0)
    }

    /// `(argmin, H^min(beta))`.
    pub fn h_min(&self, beta: f64) -> (f64, f64) {
        self.extreme(beta, -1.0)
    }

    /// Left side of the stationarity equation
    /// `-sin(x + a(x)) + sin(x + beta) - V sin(a(x) - beta) = 0`,
    /// `a = alpha^max`, a positive multiple of `dH/dx`.
    pub fn stationarity(&self, x: f64, beta: f64) -> f64 {
        let a = self.vw.alpha_max(x);
        -(x + a).sin() + (x + beta).sin() - self.vw.v * (a - beta).sin()
    }

    pub fn d2h_dx2(&self, x: f64, beta: f64) -> f64 {
        let h = 1e-4;
        (self.h(x + h, beta) - 2.0 * self.h(x, beta) + self.h(x - h, beta)) / (h * h)
    }

    /// Stationary points of `H(., beta)` in `[0, 2 pi)`.
    pub fn stationary_points(&self, beta: f64) -> Vec<f64> {
        let n = 4096;
        let step = TAU / n as f64;
        let g = |x: f64| self.stationarity(x, beta);
        let mut roots = Vec::new();
        for k in 0..n {
            let (mut a, mut b) = ((k as f64 + 0.5) * step, (k as f64 + 1.5) * step);
            let (mut ga, gb) = (g(a), g(b));
            if ga == 0.0 {
                roots.push(a);
                continue;
            }
            if ga * gb >= 0.0 {
                continue;
            }
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                let gm = g(m);
                if gm == 0.0 || (b - a) < 1e-15 {
                    a = m;
                    b = m;
                    break;
                }
                if ga * gm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    ga = gm;
                }
            }
            roots.push((0.5 * (a + b)).rem_euclid(TAU));
        }
        roots
    }

    fn newton(&self, mut x: f64, beta: f64) -> Option<f64> {
        let d = 1e-7;
        for _ in 0..50 {
            let g = self.stationarity(x, beta);
            let gx = (self.stationarity(x + d, beta) - self.stationarity(x - d, beta)) / (2.0 * d);
            if gx == 0.0 || !gx.is_finite() {
                return None;
            }
            let dx = g / gx;
            x -= dx;
            if dx.abs() < 1e-13 {
                return (self.stationarity(x, beta).abs() < 1e-10).then_some(x);
            }
        }
        None
    }

    /// Branches `x_i(beta)`, `h_i(beta) = H(x_i(beta), beta)` on `[0, pi]`,
    /// continued from every stationary point of `H(., 0)` by a
    /// predictor-corrector in `beta` with `steps` steps. A branch stops where
    /// the corrector fails or `d2H/dx2` changes sign (a fold). The family
    /// with `alpha^max(x) = beta` is appended last.
    pub fn branches(&self, steps: usize) -> Vec<Branch> {
        let hb = PI / steps as f64;
        let d = 1e-7;
        let mut out = Vec::new();
        for x0 in self.stationary_points(0.0) {
            let mut br = Branch { id: out.len(), kind: BranchKind::Stationary, beta: vec![0.0], x: vec![x0], h: vec![self.h(x0, 0.0)] };
            let curv0 = self.d2h_dx2(x0, 0.0).signum();
            let mut x = x0;
            for s in 1..=steps {
                let b0 = (s - 1) as f64 * hb;
                let b1 = s as f64 * hb;
                let gx = (self.stationarity(x + d, b0) - self.stationarity(x - d, b0)) / (2.0 * d);
                let gb = (self.stationarity(x, b0 + d) - self.stationarity(x, b0 - d)) / (2.0 * d);
                let pred = if gx != 0.0 { x - hb * gb / gx } else { x };
                let Some(xn) = self.newton(pred, b1) else { break };
                if (xn - pred).abs() > 0.25 || self.d2h_dx2(xn, b1).signum() != curv0 {
                    break;
                }
                x = xn;
                br.beta.push(b1);
                br.x.push(x.rem_euclid(TAU));
                br.h.push(self.h(x, b1));
            }
            out.push(br);
        }
        let fam = self.alpha_beta_branch(steps, out.len());
        if !fam.beta.is_empty() {
            out.push(fam);
        }
        out
    }

    /// The family `alpha^max(x) = beta`, traced while a solution exists.
    pub fn alpha_beta_branch(&self, steps: usize, id: usize) -> Branch {
        let hb = PI / steps as f64;
        let phi = |x: f64, b: f64| (self.vw.alpha_max(x) - b).sin();
        let ok = |x: f64, b: f64| (self.vw.alpha_max(x) - b).cos() > 0.0;
        let mut br = Branch { id, kind: BranchKind::AlphaEqualsBeta, beta: Vec::new(), x: Vec::new(), h: Vec::new() };
        let mut prev: Option<f64> = None;
        for s in 0..=steps {
            let b = s as f64 * hb;
            let n = 2048;
            let step = TAU / n as f64;
            let mut best: Option<f64> = None;
            for k in 0..n {
                let (mut a, mut c) = ((k as f64 + 0.5) * step, (k as f64 + 1.5) * step);
                let (mut fa, fc) = (phi(a, b), phi(c, b));
                if fa * fc > 0.0 || !ok(0.5 * (a + c), b) {
                    continue;
                }
                for _ in 0..80 {
                    let m = 0.5 * (a + c);
                    let fm = phi(m, b);
                    if fa * fm <= 0.0 {
                        c = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                }
                let r = 0.5 * (a + c);
                if phi(r, b).abs() > 1e-9 {
                    continue;
                }
                let better = match (best, prev) {
                    (None, _) => true,
                    (Some(cur), Some(p)) => circ_dist(r, p) < circ_dist(cur, p),
                    (Some(_), None) => false,
                };
                if better {
                    best = Some(r);
                }
            }
            let Some(r) = best else { break };
            prev = Some(r);
            br.beta.push(b);
            br.x.push(r.rem_euclid(TAU));
            br.h.push(self.h(r, b));
        }
        br
    }
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Where an extreme of `H(., 0)` is attained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Attainment {
    /// `cos x = value`.
    CosEquals(f64),
    OddMultipleOfPi,
    EvenMultipleOfPi,
    MultipleOfPi,
}

/// The three parameter regimes of `H(., 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `V < W`.
    A,
    /// `W < V <= 2W/(1+W)`.
    B,
    /// `V > 2W/(1+W)`.
    C,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AppendixB {
    pub h_max0: f64,
    pub h_min0: f64,
    pub q1: f64,
    pub k: f64,
    pub l: f64,
    pub x0_max: Attainment,
    pub x0_min: Attainment,
    pub regime: Regime,
    /// `H^max(0) <= (1+V)/(1-W)` in regimes A and B.
    pub bound: Option<f64>,
    /// `V = W`, where the values are the common limit of the neighbouring
    /// regimes.
    pub limiting: bool,
}

/// Closed forms of `max_x H(x, 0)` and `min_x H(x, 0)`.
pub fn appendix_b_closed_forms(v1: f64, w1: f64) -> Result<AppendixB> {
    HFunction::new(v1, w1)?;
    let (v, w) = (v1, w1);
    let q1 = v / (2.0 * w) * (1.0 + w);
    let l = (v * v - w) / (v * (1.0 - w));
    let k = v - l;
    let first = v <= 2.0 * w / (1.0 + w);
    let regime = if v <= w {
        Regime::A
    } else if first {
        Regime::B
    } else {
        Regime::C
    };
    let h_max0 = if first {
        (1.0 - v * v) / ((1.0 - w) * (1.0 - q1 * v))
    } else {
        (1.0 + v) / ((1.0 + w) * (1.0 - v))
    };
    Ok(AppendixB {
        h_max0,
        h_min0: 1.0 / (1.0 - w),
        q1,
        k,
        l,
        x0_max: if first { Attainment::CosEquals(-q1) } else { Attainment::OddMultipleOfPi },
        x0_min: if regime == Regime::A { Attainment::MultipleOfPi } else { Attainment::EvenMultipleOfPi },
        regime,
        bound: first.then(|| (1.0 + v) / (1.0 - w)),
        limiting: v == w,
    })
}

/// `|(H_xx - H_xbeta)(x, 0) - (f^max)''(x) / (1 + V cos x)|` by central
/// differences with one Richardson step. Meaningful at multiples of `pi`.
///
/// The denominator is the first power: differentiating the quotient twice
/// leaves `f'' (1 + V cos x)^2 / (1 + V cos x)^3`. Only the sign of the
/// difference matters for the branch analysis, and that sign is the sign of
/// `f''` either way.
pub fn appendix_c_identity_check(v1: f64, w1: f64, x: f64) -> Result<f64> {
    let vw = VwFunctions::new(v1, w1)?;
    let h = |x: f64, b: f64| vw.f_max(x) / (1.0 + v1 * (x + b).cos());
    let rich = |d: &dyn Fn(f64) -> f64, s: f64| (4.0 * d(s / 2.0) - d(s)) / 3.0;
    let hxx = |s: f64| (h(x + s, 0.0) - 2.0 * h(x, 0.0) + h(x - s, 0.0)) / (s * s);
    let hxb = |s: f64| (h(x + s, s) - h(x + s, -s) - h(x - s, s) + h(x - s, -s)) / (4.0 * s * s);
    let fxx = |s: f64| (vw.f_max(x + s) - 2.0 * vw.f_max(x) + vw.f_max(x - s)) / (s * s);
    let step = FD_STEP;
    let lhs = rich(&hxx, step) - rich(&hxb, step);
    let rhs = rich(&fxx, step) / (1.0 + v1 * x.cos());
    Ok((lhs - rhs).abs())
}

/// Base step of the Richardson-refined second differences.
pub const FD_STEP: f64 = 1e-3;

/// One group's contribution to the onset decomposition of `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OnsetTerm {
    pub group: usize,
    /// `exp((r_j - r_1) t)`.
    pub decay: f64,
    /// `f_j / f_1`.
    pub f_ratio: f64,
    /// `|w_hat^{(j)} u| / |w_hat^{(1)} u|`, vector form only.
    pub w_ratio: Option<f64>,
    /// `G_j = g_j / g_1`.
    pub g_ratio: f64,
}

impl OnsetTerm {
    pub fn value(&self) -> f64 {
        self.decay * self.f_ratio * self.w_ratio.unwrap_or(1.0) * self.g_ratio
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Onset {
    pub epsilon: f64,
    pub terms: Vec<OnsetTerm>,
}

/// `epsilon(t, u)` (or `epsilon(t)` without `u`) as a sum over groups of
/// decay, normalization, projection and oscillation ratios.
pub fn onset_decomposition(params: &GenericRealParams, t: f64, u: Option<&CVec>) -> Result<Onset> {
    let cfg = params.cfg;
    let g1 = params.groups.first().ok_or_else(|| Error::GenericityViolated("no groups".into()))?;
    let (p1, g1v) = match u {
        Some(u) => {
            real_vec(u)?;
            let p1 = g1.project(u).norm();
            if p1 <= 1e-12 * vector_norm(u, NormP::Inf) {
                return Err(Error::ZeroProjection);
            }
            (Some(p1), g1.g_vector(t, u, cfg)?)
        }
        None => (None, g1.g_matrix(t, cfg)?),
    };
    let mut terms = Vec::with_capacity(params.groups.len().saturating_sub(1));
    for gj in &params.groups[1..] {
        let (w_ratio, gv) = match (u, p1) {
            (Some(u), Some(p1)) => (Some(gj.project(u).norm() / p1), gj.g_vector(t, u, cfg)?),
            _ => (None, gj.g_matrix(t, cfg)?),
        };
        terms.push(OnsetTerm {
            group: gj.group,
            decay: ((gj.r - g1.r) * t).exp(),
            f_ratio: gj.f / g1.f,
            w_ratio,
            g_ratio: gv / g1v,
        });
    }
    Ok(Onset { epsilon: terms.iter().map(OnsetTerm::value).sum(), terms })
}

