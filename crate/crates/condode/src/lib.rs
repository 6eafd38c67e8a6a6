//! Condition numbers of the map `y0 -> exp(tA) y0`.
//!
//! The library works from a Jordan decomposition `A = V J V^{-1}` and provides
//! the exact condition numbers (directional, initial-value, global), their
//! long-time asymptotic forms together with rigorous precision bounds, and the
//! explicit theory for real matrices whose rightmost spectrum is a single real
//! eigenvalue or a single simple conjugate pair.
//!
//! A typical session:
//!
//! ```
//! use condode::{jcf, Model, NormConfig, Tolerances, condnum};
//! use num_complex::Complex64 as C64;
//!
//! let spec = jcf::JordanSpec::new(vec![jcf::Eigen::new(C64::new(1.0, 0.0), vec![2])]).unwrap();
//! let v = condode::cmat_from_real(2, 2, &[1.0, 0.5, 1.0, 1.0]);
//! let sd = jcf::SpectralData::new(spec, v, &Tolerances::default()).unwrap();
//! let model = Model::new(sd, Tolerances::default());
//! let k = condnum::k_inf_global(&model, 10.0, NormConfig::two()).unwrap().value();
//! assert!((k - 40.0).abs() < 1e-9);
//! ```

pub mod condnum;
pub mod error;
pub mod exec;
pub mod expm;
pub mod genreal;
pub mod jcf;
pub mod linalg;
pub mod norms;
pub mod partition;
pub mod projectors;
mod tol;

pub use error::{Error, Result};
pub use exec::Exec;
pub use linalg::{cmat_from_real, cvec_from_real, CMat, CVec, C64};
pub use norms::{NormConfig, NormP, Semantics};
pub use partition::SpectralPartition;
pub use projectors::ProjectorFamily;
pub use tol::Tolerances;

use jcf::SpectralData;

/// A decomposition bundled with its projectors and spectral partition.
///
/// Everything downstream of the Jordan basis is derived once here, so the
/// evaluation routines only read.
#[derive(Clone, Debug)]
pub struct Model {
    pub sd: SpectralData,
    pub fam: ProjectorFamily,
    pub part: SpectralPartition,
    pub tol: Tolerances,
}

impl Model {
    pub fn new(sd: SpectralData, tol: Tolerances) -> Self {
        let fam = projectors::build_projectors(&sd);
        let part = partition::partition_spectrum(&sd, tol.tol_group(&sd));
        Model { sd, fam, part, tol }
    }

    /// Model of `zA`.
    pub fn scaled(&self, z: C64) -> Result<Self> {
        let sd = jcf::scale_decomposition(&self.sd, z)?;
        Ok(Model::new(sd, self.tol.clone()))
    }

    pub fn n(&self) -> usize {
        self.sd.n()
    }
}
