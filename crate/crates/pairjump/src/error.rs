//! Crate-wide error type.
//!
//! Numerical routines report structural problems (dimension mismatches,
//! singular states) as typed errors rather than panicking, so that ensemble
//! drivers can distinguish a dead stochastic trajectory from a programming
//! mistake.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    #[error("state vector has zero (or denormal) norm")]
    ZeroNormState,

    #[error("operator is not Hermitian: max |M - M^dag| = {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NonHermitian { deviation: f64, tolerance: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("total Hilbert-space dimension {dim} exceeds supported cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("stochastic trajectory died (norm underflow or non-finite amplitudes)")]
    DeadTrajectory,

    #[error("ensemble contains no live trajectories")]
    EmptyEnsemble,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("growth-rate fit window [{lo}, {hi}] contains fewer than {min_samples} samples")]
    FitWindow { lo: f64, hi: f64, min_samples: usize },

    #[error("mean norm must stay positive inside the fit window (found {value:.3e} at t = {t:.3})")]
    NonPositiveNorm { value: f64, t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
