//! Error taxonomy shared by all modules.

use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// The third-order equation divides by x'; near-zero x' makes the
    /// right-hand side meaningless (approach to the critical degeneracy
    /// or a blowup).
    #[error("singular derivative: |x'| below guard at t = {t}")]
    SingularDerivative { t: f64 },

    /// The adaptive integrator could not make progress; `t` is the last
    /// reliable time.
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    /// Logarithmic reduction sampled where x <= 0.
    #[error("non-positive x at t = {t}")]
    NonPositiveX { t: f64 },

    /// The non-regularized planar field divides by q.
    #[error("singular q near 0 in the non-regularized planar field")]
    SingularQ,

    /// A separatrix trace left the expected quadrant (wrong branch request).
    #[error("invariant-manifold trace escaped the expected quadrant at (q, p) = ({q}, {p})")]
    ManifoldEscape { q: f64, p: f64 },

    /// An asymptotic extrapolation did not converge.
    #[error("poor convergence of extrapolation (residual {residual})")]
    PoorConvergence { residual: f64 },

    /// No sign change of the probe outcome inside the initial bracket.
    #[error("could not establish a bisection bracket in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    /// A probe reached its horizon without a decisive outcome.
    #[error("probe inconclusive within t_max = {t_max}")]
    Inconclusive { t_max: f64 },

    /// The boundary-chart equation divides by g - 2sg'.
    #[error("singular denominator g - 2sg' near s = {s}")]
    SingularDenominator { s: f64 },

    /// A construction divides by psi' which vanishes at this point
    /// (the critical parameter value).
    #[error("degenerate derivative: psi'(y) = 0 near y = {y}")]
    DegenerateDerivative { y: f64 },

    /// Conformal factor non-positive where positivity is required.
    #[error("degenerate metric: conformal factor {lambda} <= 0 at (phi, y) = ({phi}, {y})")]
    DegenerateMetric { phi: f64, y: f64, lambda: f64 },

    /// The kinetic denominator of the second family vanished.
    #[error("degenerate denominator psi'^2 - psi^2 + b = 0 near y = {y}")]
    DegenerateDenominator { y: f64 },

    /// Asymptotic bound data disagrees with the grid trend.
    #[error("unbounded diagnostic: asymptotic value {asymptotic} disagrees with grid trend {grid}")]
    UnboundedDiagnostic { asymptotic: f64, grid: f64 },

    /// No x' = 0 event found where one was required.
    #[error("no stationary point of psi found for tau = {tau}")]
    NoStationaryPoint { tau: f64 },

    /// Profile ranges for an equivalence match do not overlap.
    #[error("profile ranges do not overlap")]
    NoOverlap,

    /// Invalid polar chart identifier.
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    /// Endpoint-singular quadrature failed.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// Rejected argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
