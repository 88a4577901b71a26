use thiserror::Error;

/// Errors raised by the numerical kernels, profile construction and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("step size underflow at t = {t:e} (h = {step:e})")]
    StepSizeUnderflow { t: f64, step: f64 },

    #[error("non-finite value encountered at t = {t:e}")]
    NonFinite { t: f64 },

    #[error("quadrature did not converge on [{lo}, {hi}] (estimate {estimate:e})")]
    QuadratureNoConvergence { lo: f64, hi: f64, estimate: f64 },

    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("rate fit needs at least {needed} positive samples in window, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error("non-positive sample v = {v:e} at t = {t:e} inside fit window")]
    NonPositiveSample { t: f64, v: f64 },

    #[error("time {t} outside trajectory range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("positivity lost at t = {t:e}: {what}")]
    PositivityLost { t: f64, what: &'static str },

    #[error("vacuum interpenetration at t = {t:e} between nodes {node} and {next}", next = node + 1)]
    Interpenetration { t: f64, node: usize },

    #[error("finite-difference stencil leaves the support at x = {x}")]
    StencilOutsideSupport { x: f64 },

    #[error("energy evaluation needs {needed} stored time levels, found {found}")]
    InsufficientHistory { needed: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
