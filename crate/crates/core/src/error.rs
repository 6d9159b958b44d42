//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the simulation engine and the verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A splitting draw outside the open interval (0, 1).
    #[error("invalid splitting draw {0}: must lie strictly inside (0, 1)")]
    InvalidDraw(f64),

    /// A threshold `t <= 0`, for which the crossing time is a.s. infinite.
    #[error("invalid threshold {0}: must be positive")]
    InvalidThreshold(f64),

    /// A gap shrank below 1e-300; the path can no longer be trusted in f64.
    #[error("degenerate path: gap length {0} below 1e-300 at step {1}")]
    DegeneratePath(f64, u64),

    /// An observable was requested that the engine variant does not retain.
    #[error("unsupported observable: {0}")]
    UnsupportedObservable(&'static str),

    /// A small-gap registration was added after the path had already begun.
    #[error("invalid registration: window ({0}, {1}] registered at step {2}, not step 0")]
    InvalidRegistration(f64, f64, u64),

    /// Parameters outside the conditional-independence regime `2nt <= 1`.
    #[error("regime violation: n = {n}, t = {t} requires 2*n*t <= 1")]
    RegimeViolation { n: u64, t: f64 },

    /// The self-similar sampler exceeded its node budget (a bug signal).
    #[error("recursion cap exceeded: more than {0} nodes expanded")]
    RecursionCapExceeded(u64),

    /// Argument outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// An exact-enumeration request beyond the supported budget.
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(&'static str),

    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
