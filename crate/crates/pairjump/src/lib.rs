//! Stochastic pair-of-state-vector simulation of system-environment quantum
//! dynamics.
//!
//! A system coupled to an environment is propagated as an ensemble of *pairs*
//! of stochastic state vectors, one per tensor factor, driven by correlated
//! noise whose product averages to the interaction propagator. The factors
//! never entangle — each trajectory stores one system vector and one
//! environment vector — yet the ensemble mean of the dyad reproduces the
//! exact joint dynamics, with no weak-coupling, Markov, or perturbative
//! approximation.
//!
//! The price is sampling cost: individual trajectory norms grow like
//! `exp(lambda_s t)`, so the variance of every observable grows with it. The
//! crate's focus is the hierarchy of schemes that shrink `lambda_s`:
//!
//! * [`stochastic::SchemeKind::Sse`] — plain stochastic evolution, unit noise;
//! * [`stochastic::SchemeKind::Smf`] — mean-field split: deterministic drift
//!   plus noise on the centered (fluctuation) operators;
//! * [`stochastic::SchemeKind::Osse`] — per-step optimal noise scaling and
//!   phase on the plain scheme;
//! * [`stochastic::SchemeKind::Osmf`] — the adaptive transform on top of the
//!   mean-field split, the lowest-cost member.
//!
//! Validation is dual-route: an exact eigendecomposition propagator
//! ([`oracle::exact_evolve`]) for any model small enough to diagonalize, and
//! the spin-star benchmark ([`model::build_spin_star`]) whose occupation has
//! the closed form `cos^2(2Ct)` independent of bath size.
//!
//! The `pairjump` binary (see [`cli`]) exposes ensemble runs, parameter
//! sweeps, and exact-vs-stochastic comparisons as CSV plus a JSON manifest,
//! with byte-deterministic output for a fixed configuration regardless of
//! worker-thread count.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod propagator;
pub mod stochastic;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
