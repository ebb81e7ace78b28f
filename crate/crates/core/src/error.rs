use thiserror::Error;

pub use crate::expr::ParseError;

/// Failure while evaluating an expression or a derived coefficient.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("`{op}` undefined at y = {y}")]
    Domain { op: &'static str, y: f64 },
    #[error("non-finite value at y = {y}")]
    NonFinite { y: f64 },
    #[error("expression depends on `x`, which is not bound here")]
    UnboundX,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("domain error: {0}")]
    Domain(#[from] EvalError),
    #[error("kinetic metric is singular at y = {y}")]
    SingularMetric { y: f64 },
    #[error("a11 must be a non-zero constant")]
    ZeroA11,
    #[error("invalid working interval ({0}, {1})")]
    InvalidInterval(f64, f64),
    #[error("y = {y} lies outside the working interval")]
    OutsideInterval { y: f64 },
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("missing parameter `{0}`")]
    MissingParameter(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("Phi^2_2 vanishes at y = {y}")]
    Phi22Vanishes { y: f64 },
    #[error(
        "variationality criteria disagree (rank-1 {rank1:e}, (U-nu S)' {potential:e}, nu' {nu:e})"
    )]
    InconsistentCriteria { rank1: f64, potential: f64, nu: f64 },
    #[error("adaptive quadrature failed on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },
    #[error("no equilibrium at y = 0 (S(0) = {s0:e}, U(0) = {u0:e})")]
    EquilibriumMissing { s0: f64, u0: f64 },
    #[error("no bracket for M' at y = {y}")]
    RootFindFailure { y: f64 },
    #[error("control denominator vanishes at y = {y}")]
    DenominatorVanishes { y: f64 },
    #[error("dissipation factor f is positive at (x, y) = ({x}, {y})")]
    FNotNegative { x: f64, y: f64 },
    #[error("trajectory left the working interval at t = {t}")]
    LeftWorkingInterval { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("grid needs at least {min} points, got {got}")]
    GridTooSmall { min: usize, got: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
