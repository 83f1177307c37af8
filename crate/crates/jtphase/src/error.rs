use thiserror::Error;

/// Errors surfaced by the numerical layers.
///
/// Every operation is deterministic; an error always reflects invalid input
/// or a diagnosed numerical failure, never an environment effect.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("quadrature rule failed self-check: |measured - exact| = {defect:.3e} > 1e-12 for the Gaussian moment on [0, {q_max}] with n = {n}")]
    QuadratureSelfCheck { defect: f64, q_max: f64, n: usize },

    #[error("non-finite integrand at node {index} (q = {q})")]
    NonFiniteIntegrand { index: usize, q: f64 },

    #[error("matrix is not Hermitian: max deviation {0:.3e}")]
    NotHermitian(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field vanishes everywhere above threshold")]
    FieldVanishes,

    #[error("field is not normalized: measured norm {0}")]
    NotNormalized(f64),

    #[error("phase rate ill-defined near nodes: {masked} of {total} nodes masked")]
    TooManyNodes { masked: usize, total: usize },

    #[error("grid mismatch across snapshots")]
    GridMismatch,

    #[error("time index {index} out of range for trajectory of {len} snapshots")]
    TimeIndexOutOfRange { index: usize, len: usize },

    #[error("trajectory needs at least 3 snapshots, got {0}")]
    TooFewSnapshots(usize),

    #[error("radial truncation unsafe: q_max = {q_max} < k + 6 = {required}")]
    RadialTruncationUnsafe { q_max: f64, required: f64 },

    #[error("norm drift {drift:.3e} exceeded 1e-8 after step {step}")]
    NormDrift { drift: f64, step: usize },

    #[error("boundary density {0:.3e} of peak exceeds 1e-12; widen the grid")]
    BoundaryLeak(f64),

    #[error("eigensolver did not converge within {0} iterations")]
    EigensolverStalled(usize),

    #[error("basis dimension {0} exceeds the memory budget (1e6)")]
    BasisTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
