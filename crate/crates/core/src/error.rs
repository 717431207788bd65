//! Error type shared by all numerical modules.

use thiserror::Error;

/// Errors reported by kernel evaluation, special functions, transforms and
/// simulation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("order {0} outside supported range |order| <= {1}")]
    OrderOutOfRange(f64, f64),
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("bracket arguments must satisfy beta < alpha, got alpha={alpha}, beta={beta}")]
    ArgumentOrderViolated { alpha: f64, beta: f64 },
    #[error("exponent {0} outside admissible range {1}")]
    ExponentOutOfRange(f64, &'static str),
    #[error("Laplace inversion unstable at t={t}: {detail}")]
    InversionUnstable { t: f64, detail: String },
    #[error("transform does not support the requested evaluation domain: {0}")]
    DomainMismatch(&'static str),
    #[error("quadrature failed to converge: {0}")]
    QuadratureNonConvergent(&'static str),
    #[error("convolution grid too coarse: {0}")]
    ConvolutionGridTooCoarse(String),
    #[error("negative density {value:.3e} beyond tolerance {tol:.3e}")]
    NegativeDensityBeyondTolerance { value: f64, tol: f64 },
    #[error("killed-kernel comparator is defined at unit barrier; rescale first (a={0})")]
    BarrierNotUnit(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("point below the barrier: height {height} <= a = {barrier}")]
    BelowBarrier { height: f64, barrier: f64 },
    #[error("kernel is singular on the diagonal x = y")]
    DiagonalSingularity,
    #[error("estimate requires dimension n > 2, got n = {0}")]
    DimensionTooLow(usize),
    #[error("step too coarse: {0}")]
    StepTooCoarse(String),
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
