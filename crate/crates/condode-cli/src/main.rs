//! `condode`: condition-number curves, `H` branches and model diagnostics as CSV.

mod csv;
mod input;

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use condode::condnum::{curve, prefers_log_scale};
use condode::expm::{expm_jordan, expm_oracle};
use condode::genreal::{appendix_c_identity_check, extract_generic, BranchKind, HFunction};
use condode::linalg::cond2;
use condode::partition::negation_identity_check;
use condode::projectors::verify_independence;
use condode::{CMat, CVec, Exec, Model, NormConfig, NormP, Semantics};

use csv::{num, opt, Csv};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical { op: &'static str, err: condode::Error },
}

impl CliError {
    /// Wraps a library error raised by `op`, sorting it into config or numerical.
    pub fn lib(op: &'static str) -> impl Fn(condode::Error) -> CliError {
        move |err| {
            use condode::Error::*;
            match err {
                InvalidSpec(_) | DimensionMismatch { .. } | ShapeMismatch(_) | ParameterOutOfRange(_) | ZeroVector
                | ZeroScalar | IndexOutOfRange { .. } => CliError::Config(format!("{op}: {err}")),
                _ => CliError::Numerical { op, err },
            }
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical { op, err } => write!(f, "numerical failure in {op}: {err}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "condode", version, about = "Condition numbers of y0 -> exp(tA) y0")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact and asymptotic condition numbers over a time grid.
    Curves(RunArgs),
    /// Branches of stationary points of H(., beta) for the leading pair.
    Branches(RunArgs),
    /// H(x, 0) over [0, 2 pi].
    Hcurve(RunArgs),
    /// Consistency diagnostics for a model.
    Check(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Inf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemArg {
    Real,
    Complex,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Model file: {"matrix": [[..]]} or {"jcf": {"eigenvalues": [..], "basis": [[..]]}}.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "2")]
    norm: NormArg,
    #[arg(long, value_enum, default_value = "complex")]
    semantics: SemArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t_start: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    t_end: f64,
    #[arg(long, default_value_t = 256)]
    steps: usize,
    /// Logarithmically spaced times (needs t-start > 0).
    #[arg(long)]
    log_t: bool,
    /// Initial value, comma separated; entries may be complex as in 1+2i.
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<String>,
    /// Perturbation direction, same format as --y0.
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
    /// Shape parameter V of the leading pair; taken from --input when absent.
    #[arg(long)]
    v1: Option<f64>,
    /// Shape parameter W of the leading pair.
    #[arg(long)]
    w1: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

impl RunArgs {
    fn cfg(&self) -> NormConfig {
        let p = match self.norm {
            NormArg::One => NormP::One,
            NormArg::Two => NormP::Two,
            NormArg::Inf => NormP::Inf,
        };
        let s = match self.semantics {
            SemArg::Real => Semantics::Real,
            SemArg::Complex => Semantics::Complex,
        };
        NormConfig::new(p, s)
    }

    fn model(&self) -> Result<Model, CliError> {
        let path = self.input.as_ref().ok_or_else(|| CliError::Config("--input is required".into()))?;
        input::load_model(path, input::tolerances()?)
    }

    fn grid(&self) -> Result<Vec<f64>, CliError> {
        let (a, b, n) = (self.t_start, self.t_end, self.steps);
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(CliError::Config(format!("need finite t-start < t-end, got {a} and {b}")));
        }
        if n < 2 {
            return Err(CliError::Config("--steps must be at least 2".into()));
        }
        let h = 1.0 / (n - 1) as f64;
        if self.log_t {
            if a <= 0.0 {
                return Err(CliError::Config("--log-t needs t-start > 0".into()));
            }
            let (la, lb) = (a.ln(), b.ln());
            Ok((0..n).map(|k| if k + 1 == n { b } else { (la + (lb - la) * k as f64 * h).exp() }).collect())
        } else {
            Ok((0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 * h }).collect())
        }
    }

    fn vector(&self, s: &Option<String>, flag: &str, n: usize) -> Result<Option<CVec>, CliError> {
        let Some(s) = s else { return Ok(None) };
        let v = input::parse_vector(s, flag)?;
        if v.len() != n {
            return Err(CliError::Config(format!("{flag} has {} entries, the model has dimension {n}", v.len())));
        }
        Ok(Some(v))
    }

    /// `(V1, W1)` from the flags, else from the model's leading group.
    fn shape(&self) -> Result<(f64, f64), CliError> {
        match (self.v1, self.w1) {
            (Some(v), Some(w)) => Ok((v, w)),
            (None, None) => {
                let model = self.model()?;
                let g = extract_generic(&model, 0, NormConfig::two()).map_err(CliError::lib("genreal::extract_generic"))?;
                let s = g.shape.ok_or_else(|| {
                    CliError::Config("the leading eigenvalue is real; branches need a conjugate pair".into())
                })?;
                Ok((s.v, s.w))
            }
            _ => Err(CliError::Config("give both --v1 and --w1, or neither".into())),
        }
    }
}

fn cmd_curves(args: &RunArgs) -> Result<String, CliError> {
    let model = args.model()?;
    let ts = args.grid()?;
    let y0 = args.vector(&args.y0, "--y0", model.n())?;
    let z0 = args.vector(&args.z0, "--z0", model.n())?;
    let log_scale = prefers_log_scale(&model);
    let table = curve(&model, args.cfg(), &ts, y0.as_ref(), z0.as_ref(), log_scale, Exec::default())
        .map_err(CliError::lib("condnum::curve"))?;
    let mut out = Csv::new("t,K_dir,K_init,K_glob,Kinf_dir,Kinf_init,Kinf_glob_plus,Kinf_glob,eps_t,eps_t_y0,log_scale");
    for s in &table.samples {
        out.row([
            num(s.t),
            opt(s.k_dir),
            opt(s.k_init),
            opt(s.k_glob),
            opt(s.kinf_dir),
            opt(s.kinf_init),
            opt(s.kinf_glob_plus),
            opt(s.kinf_glob),
            opt(s.eps_t),
            opt(s.eps_t_y0),
            s.log_scale.to_string(),
        ]);
    }
    Ok(out.into_string())
}

fn h_function(args: &RunArgs) -> Result<HFunction, CliError> {
    let (v, w) = args.shape()?;
    HFunction::new(v, w).map_err(CliError::lib("genreal::HFunction::new"))
}

fn cmd_branches(args: &RunArgs) -> Result<String, CliError> {
    let h = h_function(args)?;
    let branches = h.branches(args.steps);
    let mut out = Csv::new("branch,kind,beta,x,h");
    for b in &branches {
        let kind = match b.kind {
            BranchKind::Stationary => "stationary",
            BranchKind::AlphaEqualsBeta => "alpha_eq_beta",
        };
        for ((beta, x), hv) in b.beta.iter().zip(&b.x).zip(&b.h) {
            out.row([b.id.to_string(), kind.to_string(), num(*beta), num(*x), num(*hv)]);
        }
    }
    Ok(out.into_string())
}

fn cmd_hcurve(args: &RunArgs) -> Result<String, CliError> {
    let h = h_function(args)?;
    let n = args.steps.max(2);
    let mut out = Csv::new("x,H");
    for k in 0..n {
        let x = TAU * k as f64 / (n - 1) as f64;
        out.row([num(x), num(h.h(x, 0.0))]);
    }
    Ok(out.into_string())
}

fn cmd_check(args: &RunArgs) -> Result<String, CliError> {
    let model = args.model()?;
    let t = args.t_end;
    let n = model.n();
    let mut out = Csv::new("check,value,ok");
    let mut put = |name: &str, v: f64, limit: Option<f64>| {
        out.row([name.to_string(), num(v), limit.map(|l| (v <= l).to_string()).unwrap_or_default()]);
    };
    put("basis_cond2", cond2(&model.sd.v), Some(model.tol.cond_cap));
    let id = CMat::identity(n, n);
    put("inverse_residual", (&model.sd.v * &model.sd.w - &id).norm(), Some(1e-10));
    let mut sum = CMat::zeros(n, n);
    let mut all = Vec::new();
    for (i, row) in model.fam.p.iter().enumerate() {
        sum += model.fam.get(i, 0).map_err(CliError::lib("projectors::get"))?;
        all.extend(row.iter().cloned());
    }
    put("projector_sum_residual", (sum - &id).norm(), Some(1e-10));
    let (indep, smin) = verify_independence(&all, &model.tol).map_err(CliError::lib("projectors::verify_independence"))?;
    put("projector_family_smin", smin, None);
    put("projector_family_independent", f64::from(u8::from(indep)), None);
    let e = expm_jordan(&model, t).map_err(CliError::lib("expm::expm_jordan"))?;
    let o = expm_oracle(&model.sd.a, t);
    put("expm_oracle_rel_error", (&e - &o).norm() / o.norm(), Some(1e-10));
    let mut neg = 0.0f64;
    for (j, g) in model.part.groups.iter().enumerate() {
        for l in 0..=g.l_max {
            let r = negation_identity_check(&model, j, l, t).map_err(CliError::lib("partition::negation_identity_check"))?;
            neg = neg.max(r);
        }
    }
    put("negation_identity_residual", neg, Some(1e-10));
    put("groups", model.part.q() as f64, None);
    if let Ok(g) = extract_generic(&model, 0, NormConfig::two()) {
        put("lead_f", g.f, None);
        if let Some(s) = g.shape {
            put("lead_V", s.v, None);
            put("lead_W", s.w, None);
            if s.w > 0.0 {
                put("lead_Q", s.v / (2.0 * s.w) * (1.0 + s.w), None);
            }
            if s.v > 0.0 && s.w > 0.0 {
                for x in [0.0, std::f64::consts::PI] {
                    let r = appendix_c_identity_check(s.v, s.w, x).map_err(CliError::lib("genreal::appendix_c_identity_check"))?;
                    put(if x == 0.0 { "h_identity_residual_0" } else { "h_identity_residual_pi" }, r, Some(1e-5));
                }
            }
        }
    }
    Ok(out.into_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, text) = match &cli.cmd {
        Cmd::Curves(a) => (a, cmd_curves(a)?),
        Cmd::Branches(a) => (a, cmd_branches(a)?),
        Cmd::Hcurve(a) => (a, cmd_hcurve(a)?),
        Cmd::Check(a) => (a, cmd_check(a)?),
    };
    std::fs::write(&args.out, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", args.out.display())))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("condode: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
