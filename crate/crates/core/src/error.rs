use alloc::string::String;
use alloc::vec::Vec;

/// Failure modes of every numerical stage in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate metric at ({u1}, {u2}): A·C - B² = {det:e}")]
    DegenerateMetric { u1: f64, u2: f64, det: f64 },

    #[error("point ({u1}, {u2}) lies within {radius} of a chart pole")]
    PoleProximity { u1: f64, u2: f64, radius: f64 },

    #[error("integration step underflow at t = {t} (state {state:?})")]
    StepUnderflow { t: f64, state: Vec<f64> },

    #[error("surface quadrature did not converge (last error estimate {estimate:e})")]
    QuadratureFailure { estimate: f64 },

    #[error("least-squares design matrix is rank deficient for model {model}")]
    FitDegenerate { model: &'static str },

    #[error("geodesic does not close: residual {residual:e} after length 2π")]
    NotClosed { residual: f64 },

    #[error("cluster {k} has {found} eigenvalues, expected {expected}")]
    ClusterIntegrity { k: usize, expected: usize, found: usize },

    #[error("discretization error: {0}")]
    Discretization(String),

    #[error("matrix quadrature inconsistency: asymmetry {asymmetry:e}")]
    QuadratureInconsistency { asymmetry: f64 },

    #[error("theta series at t = {t} needs a deeper spectrum; smallest usable t is {min_t:e}")]
    TailBound { t: f64, min_t: f64 },

    #[error("fit residual {residual:e} exceeds threshold {threshold:e}")]
    AsymptoteMismatch { residual: f64, threshold: f64 },

    #[error("kernel integral methods disagree: spectral {spectral}, direct {direct}")]
    KernelMismatch { spectral: f64, direct: f64 },

    #[error("cluster structures are not aligned: {0}")]
    Misaligned(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
