//! JSON model files and the tolerance override file.

use std::path::Path;

use condode::jcf::{self, Eigen, JordanSpec, SpectralData};
use condode::{CMat, Model, Tolerances, C64};
use serde::Deserialize;

use crate::CliError;

/// A matrix entry: a real number or `[re, im]`.
#[derive(Deserialize, Clone, Copy, Debug)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for C64 {
    fn from(e: Entry) -> C64 {
        match e {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct EigenSpec {
    pub lambda: Entry,
    pub miniblocks: Vec<usize>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct JcfSpec {
    pub eigenvalues: Vec<EigenSpec>,
    /// The Jordan basis given by rows; column k holds the k-th chain vector.
    pub basis: Vec<Vec<Entry>>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub matrix: Option<Vec<Vec<Entry>>>,
    pub jcf: Option<JcfSpec>,
}

fn square(rows: &[Vec<Entry>], what: &str) -> Result<CMat, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!("{what} must be a nonempty square array of rows")));
    }
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j].into()))
}

pub fn load_model(path: &Path, tol: Tolerances) -> Result<Model, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let input: InputFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let sd = match (input.matrix, input.jcf) {
        (Some(m), None) => {
            let a = square(&m, "matrix")?;
            jcf::from_diagonalizable(&a, &tol).map_err(CliError::lib("jcf::from_diagonalizable"))?
        }
        (None, Some(j)) => {
            let eigs = j
                .eigenvalues
                .iter()
                .map(|e| Eigen::new(e.lambda.into(), e.miniblocks.clone()))
                .collect();
            let spec = JordanSpec::new(eigs).map_err(CliError::lib("jcf::JordanSpec::new"))?;
            let v = square(&j.basis, "jcf.basis")?;
            SpectralData::new(spec, v, &tol).map_err(CliError::lib("jcf::SpectralData::new"))?
        }
        _ => return Err(CliError::Config(format!("{}: give exactly one of \"matrix\" and \"jcf\"", path.display()))),
    };
    Ok(Model::new(sd, tol))
}

/// Fields of [`Tolerances`] that a JSON file may override.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct TolOverride {
    inv_factor: Option<f64>,
    chain_factor: Option<f64>,
    distinct_factor: Option<f64>,
    cond_cap: Option<f64>,
    zero_factor: Option<f64>,
    group_factor: Option<f64>,
    group_floor: Option<f64>,
    indep_factor: Option<f64>,
    restricted_samples: Option<usize>,
    sample_seed: Option<u64>,
    overflow_limit: Option<f64>,
}

impl TolOverride {
    pub fn apply(self, mut t: Tolerances) -> Tolerances {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(x) = self.$f { t.$f = x; } )* };
        }
        set!(inv_factor, chain_factor, distinct_factor, cond_cap, zero_factor, group_factor, group_floor,
             indep_factor, restricted_samples, sample_seed, overflow_limit);
        t
    }
}

/// Defaults, overridden by the file named in `CONDODE_TOL_FILE` if set.
pub fn tolerances() -> Result<Tolerances, CliError> {
    let Some(path) = std::env::var_os("CONDODE_TOL_FILE") else {
        return Ok(Tolerances::default());
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("CONDODE_TOL_FILE {}: {e}", path.to_string_lossy())))?;
    let ov: TolOverride = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("CONDODE_TOL_FILE {}: {e}", path.to_string_lossy())))?;
    Ok(ov.apply(Tolerances::default()))
}

/// `"1,0.5,-2+1i"` as a vector.
pub fn parse_vector(s: &str, flag: &str) -> Result<condode::CVec, CliError> {
    let vals = s
        .split(',')
        .map(|x| x.trim().parse::<C64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(format!("{flag}: {e}")))?;
    Ok(condode::CVec::from_vec(vals))
}
