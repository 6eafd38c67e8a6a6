use crate::jcf::SpectralData;
use crate::linalg::{norm_inf_mat, CMat};

/// Numerical thresholds. Relative factors are scaled by `n` or `||A||_inf`
/// where the quantity is defined that way.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// `||VW - I||_inf <= inv_factor * n`.
    pub inv_factor: f64,
    /// Chain residuals `<= chain_factor * ||A||_inf`.
    pub chain_factor: f64,
    /// Eigenvalues closer than `distinct_factor * ||A||_inf` are clustered.
    pub distinct_factor: f64,
    /// Largest accepted 2-norm condition number of a Jordan basis.
    pub cond_cap: f64,
    /// Components with `|alpha| <= zero_factor * ||alpha||_inf` count as zero.
    pub zero_factor: f64,
    /// Real parts within `group_factor * max|Re lambda|` share a group.
    pub group_factor: f64,
    pub group_floor: f64,
    /// Families are independent when `s_min > indep_factor * s_max`.
    pub indep_factor: f64,
    /// Directions sampled for restricted norms with p in {1, inf}.
    pub restricted_samples: usize,
    pub sample_seed: u64,
    /// Guard on `max|Re lambda| * |t|` for the plain exponential.
    pub overflow_limit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            inv_factor: 1e-10,
            chain_factor: 1e-9,
            distinct_factor: 1e-8,
            cond_cap: 1e12,
            zero_factor: 1e-12,
            group_factor: 1e-9,
            group_floor: 1e-12,
            indep_factor: 1e-8,
            restricted_samples: 100_000,
            sample_seed: 0x5eed_c0de,
            overflow_limit: 700.0,
        }
    }
}

impl Tolerances {
    pub fn eta_inv(&self, n: usize) -> f64 {
        self.inv_factor * n.max(1) as f64
    }

    pub fn eta_chain(&self, a: &CMat) -> f64 {
        self.chain_factor * norm_inf_mat(a).max(1.0)
    }

    pub fn tol_distinct(&self, a: &CMat) -> f64 {
        self.distinct_factor * norm_inf_mat(a)
    }

    pub fn tol_group(&self, sd: &SpectralData) -> f64 {
        let m = sd
            .spec
            .eigs
            .iter()
            .map(|e| e.lambda.re.abs())
            .fold(0.0, f64::max);
        (self.group_factor * m).max(self.group_floor)
    }
}
