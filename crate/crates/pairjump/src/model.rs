//! System-environment coupling models.
//!
//! An interaction Hamiltonian is kept in factorized form
//! `H_I = sum_alpha A_alpha ⊗ B_alpha`, one [`Channel`] per term, with
//! `A_alpha` acting on the system factor and `B_alpha` on the environment
//! factor. The stochastic schemes never need the assembled joint-space matrix;
//! it is materialized only for exact reference propagation and for
//! consistency checks.
//!
//! The built-in benchmark is the spin-star model: one central spin-1/2 coupled
//! to `N` bath spins through
//! `H = 2 sum_alpha C_alpha (sigma_+ sigma_-^(alpha) + sigma_- sigma_+^(alpha))`
//! with uniform couplings `C_alpha = C / sqrt(N)`. In factorized form each
//! bath spin contributes two channels with prefactor `sqrt(2C/sqrt(N))` on
//! both factors. The `sqrt(N)` dilution cancels the collective enhancement of
//! the symmetric bath mode, so the central-spin survival probability is
//! `cos^2(2Ct)` for every bath size.
//!
//! Conventions: single-spin basis order is `(|+>, |->)`, so
//! `sigma_+ = |+><-|` has its single nonzero entry at row 0, column 1. The
//! environment basis index packs bath spins big-endian (bath spin 0 is the
//! slowest index). Channels are enumerated bath-index ascending, with the
//! `sigma_+`-system channel before the `sigma_-`-system channel.

use crate::linalg::{Operator, StateVector, C64};
use crate::propagator::ProductState;
use crate::{Error, Result};

/// One factorized coupling term `A ⊗ B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    system_op: Operator,
    env_op: Operator,
}

impl Channel {
    pub fn new(system_op: Operator, env_op: Operator) -> Self {
        Self { system_op, env_op }
    }

    pub fn system_op(&self) -> &Operator {
        &self.system_op
    }

    pub fn env_op(&self) -> &Operator {
        &self.env_op
    }
}

/// Factorized interaction Hamiltonian `sum_alpha A_alpha ⊗ B_alpha`.
#[derive(Debug, Clone)]
pub struct InteractionHamiltonian {
    system_dim: usize,
    env_dim: usize,
    channels: Vec<Channel>,
}

impl InteractionHamiltonian {
    /// Builds from explicit channels. All system operators must share one
    /// dimension, likewise the environment operators. An empty channel list is
    /// allowed (free evolution; here that means no evolution at all since the
    /// model carries no self-Hamiltonians). If the assembled total is not
    /// Hermitian the constructor only warns: non-Hermitian couplings are
    /// legitimate for experimentation, but none of the built-in models produce
    /// them.
    pub fn new(system_dim: usize, env_dim: usize, channels: Vec<Channel>) -> Result<Self> {
        if system_dim == 0 || env_dim == 0 {
            return Err(Error::InvalidParameter("factor dimensions must be positive".into()));
        }
        for (k, ch) in channels.iter().enumerate() {
            if ch.system_op.dim() != system_dim {
                return Err(Error::DimensionMismatch {
                    expected: system_dim,
                    actual: ch.system_op.dim(),
                    context: "channel system operator dimension",
                });
            }
            if ch.env_op.dim() != env_dim {
                return Err(Error::DimensionMismatch {
                    expected: env_dim,
                    actual: ch.env_op.dim(),
                    context: "channel environment operator dimension",
                });
            }
            let _ = k;
        }
        let h = Self { system_dim, env_dim, channels };
        if !h.channels.is_empty() {
            let total = h.assemble_total();
            if total.ensure_hermitian().is_err() {
                log::warn!(
                    "assembled interaction Hamiltonian is not Hermitian (deviation {:.3e}); \
                     norm-growth identities assume Hermitian couplings",
                    total.hermiticity_deviation()
                );
            }
        }
        Ok(h)
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn total_dim(&self) -> usize {
        self.system_dim * self.env_dim
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// Materializes `sum_alpha A_alpha ⊗ B_alpha` on the joint space
    /// (system factor slow).
    pub fn assemble_total(&self) -> Operator {
        let dim = self.total_dim();
        let mut total = Operator::zeros(dim).expect("positive dimension");
        for ch in &self.channels {
            let term = ch.system_op.kron(&ch.env_op);
            total = total.add(&term).expect("dimensions agree by construction");
        }
        total
    }
}

/// Assembled joint-space interaction Hamiltonian; see
/// [`InteractionHamiltonian::assemble_total`].
pub fn assemble_total_hamiltonian(h: &InteractionHamiltonian) -> Operator {
    h.assemble_total()
}

// ---------------------------------------------------------------------------
// Pauli building blocks
// ---------------------------------------------------------------------------

/// `sigma_+ = |+><-|` in basis order `(|+>, |->)`.
pub fn sigma_plus() -> Operator {
    Operator::from_entries(
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("static 2x2")
}

/// `sigma_- = |-><+|` in basis order `(|+>, |->)`.
pub fn sigma_minus() -> Operator {
    Operator::from_entries(
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("static 2x2")
}

/// Embeds a single-spin operator at bath site `site` of an `n_bath`-spin
/// register: `I ⊗ ... ⊗ op ⊗ ... ⊗ I` with site 0 the slowest index.
fn embed_at_site(op: &Operator, n_bath: usize, site: usize) -> Operator {
    let mut out = Operator::identity(1).expect("trivial identity");
    for k in 0..n_bath {
        let factor = if k == site { op.clone() } else { Operator::identity(2).expect("2x2") };
        out = out.kron(&factor);
    }
    out
}

// ---------------------------------------------------------------------------
// Spin-star model
// ---------------------------------------------------------------------------

/// Central spin exchange-coupled uniformly to `n_bath` bath spins. The
/// per-spin strength is diluted as `coupling / sqrt(n_bath)`: the initial
/// single-excitation state couples to the symmetric bath mode with a
/// collective sqrt(N) enhancement, and this dilution cancels it exactly, so
/// the excited-state survival probability is `cos^2(2 C t)` for every bath
/// size. That bath-size-independent reference curve is what makes the model
/// a clean benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinStarModel {
    n_bath: usize,
    coupling: f64,
}

impl SpinStarModel {
    pub fn new(n_bath: usize, coupling: f64) -> Result<Self> {
        if n_bath == 0 {
            return Err(Error::InvalidParameter("spin-star model needs at least one bath spin".into()));
        }
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spin-star coupling must be non-negative and finite, got {coupling}"
            )));
        }
        Ok(Self { n_bath, coupling })
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn env_dim(&self) -> usize {
        1usize << self.n_bath
    }
}

/// Factorized spin-star interaction: `2N` channels, enumerated bath-index
/// ascending with the `sigma_+`-system channel first, both factors scaled by
/// `sqrt(2 C / sqrt(N))` so that each channel pair reassembles
/// `2 (C/sqrt(N)) (sigma_+ sigma_-^(alpha) + sigma_- sigma_+^(alpha))`; see
/// [`SpinStarModel`] for why the per-spin coupling is diluted by `sqrt(N)`.
pub fn build_spin_star(model: &SpinStarModel) -> Result<InteractionHamiltonian> {
    let n = model.n_bath;
    let per_spin = model.coupling / (n as f64).sqrt();
    let prefactor = C64::new((2.0 * per_spin).sqrt(), 0.0);
    let sp = sigma_plus().scaled(prefactor);
    let sm = sigma_minus().scaled(prefactor);
    let mut channels = Vec::with_capacity(2 * n);
    for site in 0..n {
        let env_minus = embed_at_site(&sigma_minus().scaled(prefactor), n, site);
        let env_plus = embed_at_site(&sigma_plus().scaled(prefactor), n, site);
        // sigma_+ on the system pairs with sigma_- on the bath spin (and vice
        // versa); this pairing is what reassembles the flip-flop Hamiltonian.
        channels.push(Channel::new(sp.clone(), env_minus));
        channels.push(Channel::new(sm.clone(), env_plus));
    }
    InteractionHamiltonian::new(2, model.env_dim(), channels)
}

/// Benchmark initial condition: central spin up, every bath spin down,
/// `|+> ⊗ |-,...,->`, both factors normalized.
pub fn initial_state(model: &SpinStarModel) -> ProductState {
    let system = StateVector::basis_state(2, 0).expect("dimension 2");
    let env_dim = model.env_dim();
    let env = StateVector::basis_state(env_dim, env_dim - 1).expect("all-down index in range");
    ProductState::new(system, env).expect("matching construction")
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
