//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: only 1 and 2 are supported")]
    InvalidDimension(usize),
    #[error("points per axis must be a power of two >= 8, got {0}")]
    NonPowerOfTwo(usize),
    #[error("half width must be positive, got {0}")]
    NonpositiveWidth(f64),
    #[error("derivative order {0} exceeds the supported maximum {1}")]
    OrderTooHigh(usize, usize),
    #[error("background cone is not differentiable (smoothing delta is zero)")]
    BackgroundNotDifferentiable,
    #[error("residual does not decay at the domain boundary: ring/interior ratio {ratio:.3e} exceeds tolerance {tolerance:.3e}")]
    ResidualNotDecaying { ratio: f64, tolerance: f64 },
    #[error("compact radius {radius} exceeds the safe region (half width {half_width} / 2)")]
    RadiusExceedsSafeRegion { radius: f64, half_width: f64 },
    #[error("gradient regime violated: |grad u|_inf = {0:.3} exceeds 1")]
    GradientRegimeViolated(f64),
    #[error("gradient blow-up during integration: |grad u|_inf = {norm:.3} at t = {time:.3e} exceeds the hard cap 1")]
    GradientBlowup { norm: f64, time: f64 },
    #[error("non-finite values produced at t = {0:.3e}; step size too large or data outside regime")]
    NumericalInstability(f64),
    #[error("rescaling by {lambda} leaves the domain: {reason}")]
    RescaleOutOfDomain { lambda: f64, reason: String },
    #[error("kernel under-resolved: diffusive length {length:.3e} below two grid spacings {spacing:.3e}")]
    UnderResolved { length: f64, spacing: f64 },
    #[error("kernel inversion quadrature did not converge: change {0:.3e} under node doubling")]
    QuadratureNotConverged(f64),
    #[error("estimate fit infeasible: {0}")]
    FitInfeasible(String),
    #[error("p = {p} out of range for this estimate (valid for {valid}); the space-time integral diverges")]
    POutOfRange { p: f64, valid: String },
    #[error("negative time {0} passed to a semigroup")]
    NegativeTime(f64),
    #[error("insufficient snapshots: {have} stored, {need} needed for {what}")]
    InsufficientSnapshots {
        have: usize,
        need: usize,
        what: String,
    },
    #[error("self-similarity violated: two-time profile mismatch {mismatch:.3e} exceeds tolerance {tolerance:.3e}")]
    SelfSimilarityViolated { mismatch: f64, tolerance: f64 },
    #[error("cone slope {slope:.3} exceeds the configured regime bound {bound:.3}")]
    SlopeTooLarge { slope: f64, bound: f64 },
    #[error("regime violation: {0}")]
    RegimeViolation(String),
    #[error("domain contamination: boundary ring at {ratio:.3e} of interior (tolerance {tolerance:.3e}) at t = {time:.3}")]
    DomainContamination {
        ratio: f64,
        tolerance: f64,
        time: f64,
    },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization failure: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command line tool.
    ///
    /// 0 = pass, 2 = property failure, 3 = regime violation, 4 = numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GradientRegimeViolated(_)
            | Error::GradientBlowup { .. }
            | Error::SlopeTooLarge { .. }
            | Error::RegimeViolation(_) => 3,
            Error::NumericalInstability(_)
            | Error::QuadratureNotConverged(_)
            | Error::FitInfeasible(_)
            | Error::SelfSimilarityViolated { .. }
            | Error::DomainContamination { .. }
            | Error::ResidualNotDecaying { .. } => 4,
            _ => 2,
        }
    }
}
