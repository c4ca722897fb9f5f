//! Error type shared by all solvers and pipelines.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Coefficient data violates `r > 0` or `q >= 0` at a probe point.
    #[error("invalid coefficient: {what} = {value} at x = {x}")]
    InvalidCoefficient {
        what: &'static str,
        x: f64,
        value: f64,
    },

    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    /// A defining equation never reaches its unit value within the search
    /// radius; reported by the length solvers when the coefficient mass is
    /// too thin around `x`.
    #[error("{kind}: no finite root at x = {x} within radius {radius}")]
    NoFiniteRoot {
        kind: &'static str,
        x: f64,
        radius: f64,
    },

    /// Same as `NoFiniteRoot` but for the solvers whose integrand is only
    /// available on a finite computational window.
    #[error("{kind}: search window exhausted at x = {x} (radius {radius})")]
    WindowExhausted {
        kind: &'static str,
        x: f64,
        radius: f64,
    },

    #[error("operation requires r == 1 but r({x}) deviates from 1")]
    NotUnitR { x: f64 },

    #[error("unsupported preset for {0}")]
    UnsupportedPreset(&'static str),

    #[error("fundamental-system construction failed: {0}")]
    FssConstruction(String),

    /// The integration phase `int sqrt(q/r)` over the requested domain is
    /// beyond what an explicit sweep can resolve.
    #[error("coefficients too stiff for the ODE sweep: phase {phase:.3e} exceeds budget {budget:.3e}")]
    TooStiff { phase: f64, budget: f64 },

    #[error("covering construction failed at x = {x}: {why}")]
    CoveringFailure { x: f64, why: String },

    #[error("argument out of window: x = {x}, window half-width {half_width}")]
    OutOfWindow { x: f64, half_width: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
