use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Jordan basis is singular or too ill-conditioned (condition estimate {cond:e})")]
    SingularBasis { cond: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("eigenvalues {a} and {b} are closer than the distinctness tolerance {tol:e}; supply an explicit Jordan form")]
    ClusteredSpectrum { a: String, b: String, tol: f64 },
    #[error("{0} did not converge")]
    NonConvergence(&'static str),
    #[error("scaling factor must be nonzero")]
    ZeroScalar,
    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange { what: &'static str, index: usize, limit: usize },
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("exp(tA) would overflow: |r t| = {exponent} exceeds {limit}; use the log-domain routines")]
    OverflowRisk { exponent: f64, limit: f64 },
    #[error("generic real hypothesis fails: {0}")]
    GenericityViolated(String),
    #[error("closed form requires the 2-norm")]
    WrongNormConfigured,
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("vector has no component along the dominant left eigenvector")]
    ZeroProjection,
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("invalid Jordan specification: {0}")]
    InvalidSpec(String),
}
