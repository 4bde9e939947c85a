use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no interior point with margin {margin} found after {attempts} attempts")]
    EmptyRegion { margin: f64, attempts: u64 },

    #[error("point is not interior: coordinate {index} is {value}")]
    NonInteriorPoint { index: usize, value: f64 },

    /// `1 + t F''(t)` at or below the degeneracy threshold.
    #[error("degenerate metric: 1 + t F''(t) = {margin} at t = {t}")]
    DegenerateMetric { t: f64, margin: f64 },

    #[error("t = {t} outside the domain ({t_min}, {t_max})")]
    DomainViolation { t: f64, t_min: f64, t_max: f64 },

    #[error(
        "finite-difference stencil of step {step} leaves the domain (facet distance {distance})"
    )]
    StencilExitsDomain { step: f64, distance: f64 },

    #[error("hessian is singular or not positive definite")]
    SingularHessian,

    #[error("dimension {0} exceeds the dense-inversion limit of 16")]
    DimensionTooLarge(usize),

    #[error("sample points are affinely degenerate")]
    DegeneratePointSet,

    #[error("boundary system is singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("closed-form denominator vanishes")]
    ZeroDenominator,

    #[error("pole of F'': p t^n - alpha(t) vanishes at t = {t}")]
    Pole { t: f64 },

    #[error("positivity violated: p t^n - alpha(t) = {value} at t = {t}")]
    PositivityViolation { t: f64, value: f64 },

    #[error("moment map not monotone near s = {s}")]
    NotInvertible { s: f64 },

    #[error("t = {t} is outside the image of the moment map")]
    OutOfRange { t: f64 },

    #[error("nonpositive derivative of the Kähler potential at s = {s}")]
    NonpositiveDerivative { s: f64 },
}
