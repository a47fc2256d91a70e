//! Stepping the factorized stochastic dynamics.
//!
//! A single sample of the joint dynamics is a *pair* of independently evolved
//! product states `(|Phi_1>|chi_1>, |Phi_2>|chi_2>)`; dyadics built from the
//! two members average to the joint density operator. Each member is advanced
//! with the explicit Euler-Maruyama rule
//!
//! ```text
//!   |Phi'> = |Phi> + gamma sum_alpha a_alpha A_alpha |Phi>,
//!   |chi'> = |chi> + gamma sum_alpha b_alpha B_alpha |chi>,
//! ```
//!
//! with `gamma = sqrt(dt) e^{-i pi/4}` so that `gamma^2 = dt / (i hbar)`
//! (units with `hbar = 1` throughout). The mean-field variants additionally
//! carry the deterministic drift
//!
//! ```text
//!   (dt/i) [ sum_alpha <B_alpha>_chi A_alpha - (s/2) ] |Phi>     (system),
//!   (dt/i) [ sum_alpha <A_alpha>_Phi B_alpha - (s/2) ] |chi>     (environment),
//!   s = sum_alpha <A_alpha>_Phi <B_alpha>_chi,
//! ```
//!
//! and inject noise through the centered operators `A - <A>`, `B - <B>`; the
//! two drifts reassemble the full interaction in the ensemble mean while the
//! scalar `s/2`, deliberately split evenly between the factors, compensates
//! the double-counted mean-field product.
//!
//! The adaptive schemes recompute a per-channel noise transform from the
//! current factors before every step. Two implementations exist on purpose:
//! the composable route ([`adaptive_transform`] plus [`sse_step`] /
//! [`smf_step`]), which allocates and is the reference, and a fused in-place
//! path used by [`propagate_pair`] and the ensemble driver, which reuses
//! scratch buffers and evaluates the alternative-phase triple moments with
//! `O(channels^2)` inner products instead of per-step operator algebra. Tests
//! hold the two routes together.
//!
//! A member whose squared norm leaves `[DEAD_NORM_FLOOR, inf)` (or turns
//! non-finite) marks the whole pair as dead; dead pairs are reported, never
//! silently renormalized.

use crate::linalg::{dot_slice, norm_sqr_slice, tensor_product, C64, Operator, StateVector};
use crate::model::InteractionHamiltonian;
use crate::stochastic::{
    self, phase_from_product, transform_pair, ChannelTransform, NoiseSample, NoiseSource,
    NoiseTransform, ScalingFactor, SchemeKind, CHANNEL_INACTIVE_RTOL,
};
use crate::{Error, Result};

/// Squared-norm floor below which a trajectory member counts as dead. Far
/// above the subnormal range so that downstream divisions stay safe, far
/// below anything a healthy trajectory reaches.
pub const DEAD_NORM_FLOOR: f64 = 1e-300;

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// A separable system-environment state `|Phi> ⊗ |chi>`, kept in factorized
/// form. Factors are deliberately *not* normalized during propagation; their
/// joint norm carries the statistical weight of the trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    system: StateVector,
    environment: StateVector,
}

impl ProductState {
    pub fn new(system: StateVector, environment: StateVector) -> Result<Self> {
        for (v, what) in [(&system, "system factor"), (&environment, "environment factor")] {
            let n = v.norm_sqr();
            if !n.is_finite() {
                return Err(Error::NonFinite { context: what });
            }
            if n < DEAD_NORM_FLOOR {
                return Err(Error::ZeroNormState);
            }
        }
        Ok(Self { system, environment })
    }

    pub fn system(&self) -> &StateVector {
        &self.system
    }

    pub fn environment(&self) -> &StateVector {
        &self.environment
    }

    /// `|Phi|^2 |chi|^2`, the squared norm of the joint state.
    pub fn joint_norm_sqr(&self) -> f64 {
        self.system.norm_sqr() * self.environment.norm_sqr()
    }

    /// Materializes the joint vector (system index slow).
    pub fn to_joint(&self) -> StateVector {
        tensor_product(&self.system, &self.environment)
    }
}

/// The two independent members of one trajectory sample. Dyadics
/// `|member 1><member 2|` built from the pair reproduce the joint density
/// operator in the ensemble mean.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicPair {
    ket: ProductState,
    bra: ProductState,
}

impl DyadicPair {
    pub fn new(ket: ProductState, bra: ProductState) -> Result<Self> {
        if ket.system.dim() != bra.system.dim() || ket.environment.dim() != bra.environment.dim() {
            return Err(Error::DimensionMismatch {
                expected: ket.system.dim() * ket.environment.dim(),
                actual: bra.system.dim() * bra.environment.dim(),
                context: "dyadic pair members",
            });
        }
        Ok(Self { ket, bra })
    }

    /// Both members starting from the same state, the usual initial condition.
    pub fn symmetric(state: ProductState) -> Self {
        Self { ket: state.clone(), bra: state }
    }

    pub fn ket(&self) -> &ProductState {
        &self.ket
    }

    pub fn bra(&self) -> &ProductState {
        &self.bra
    }
}

/// Time grid of the explicit integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationParams {
    dt: f64,
    step_count: usize,
}

impl IntegrationParams {
    pub fn new(dt: f64, step_count: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("time step must be positive and finite, got {dt}")));
        }
        Ok(Self { dt, step_count })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    /// The noise prefactor `sqrt(dt) e^{-i pi/4}`, whose square is `dt/i`.
    pub fn gamma(&self) -> C64 {
        C64::from_polar(self.dt.sqrt(), -std::f64::consts::FRAC_PI_4)
    }

    pub fn t_final(&self) -> f64 {
        self.time_at(self.step_count)
    }

    /// `k * dt`, computed as a product so grids are reproducible exactly.
    pub fn time_at(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.step_count).map(|k| self.time_at(k)).collect()
    }
}

/// Recorded history of one propagated pair: the state after every completed
/// step, starting with the initial pair. If the pair died, `died_at_step`
/// holds the 1-based index of the failed step and the history stops at the
/// last healthy state.
#[derive(Debug, Clone)]
pub struct PairTrajectory {
    states: Vec<DyadicPair>,
    died_at_step: Option<usize>,
}

impl PairTrajectory {
    pub fn states(&self) -> &[DyadicPair] {
        &self.states
    }

    pub fn died_at_step(&self) -> Option<usize> {
        self.died_at_step
    }

    pub fn is_dead(&self) -> bool {
        self.died_at_step.is_some()
    }
}

// ---------------------------------------------------------------------------
// Prepared model data (built once per run)
// ---------------------------------------------------------------------------

/// Per-channel data the steppers need every step but that never changes:
/// cached norms/traces and the environment adjoints for the triple-moment
/// evaluation.
pub(crate) struct Prepared<'h> {
    pub(crate) h: &'h InteractionHamiltonian,
    sys_frob_sq: Vec<f64>,
    env_frob_sq: Vec<f64>,
    sys_trace: Vec<C64>,
    env_trace: Vec<C64>,
    env_adjoint: Vec<Operator>,
}

impl<'h> Prepared<'h> {
    pub(crate) fn new(h: &'h InteractionHamiltonian) -> Self {
        let sys_frob_sq = h.channels().iter().map(|c| c.system_op().frobenius_norm_sqr()).collect();
        let env_frob_sq = h.channels().iter().map(|c| c.env_op().frobenius_norm_sqr()).collect();
        let sys_trace = h.channels().iter().map(|c| c.system_op().trace()).collect();
        let env_trace = h.channels().iter().map(|c| c.env_op().trace()).collect();
        let env_adjoint = h.channels().iter().map(|c| c.env_op().adjoint()).collect();
        Self { h, sys_frob_sq, env_frob_sq, sys_trace, env_trace, env_adjoint }
    }
}

/// Reusable per-worker buffers; nothing in here survives a step.
pub(crate) struct StepScratch {
    xs: Vec<f64>,
    sample: Vec<(C64, C64)>,
    transform: Vec<ChannelTransform>,
    sys_vecs: Vec<Vec<C64>>,
    env_vecs: Vec<Vec<C64>>,
    env_adj_vecs: Vec<Vec<C64>>,
    sys_tmp: Vec<C64>,
    mean_a: Vec<C64>,
    mean_b: Vec<C64>,
    m2_a: Vec<f64>,
    m2_b: Vec<f64>,
    cf_a: Vec<f64>,
    cf_b: Vec<f64>,
    new_phi: Vec<C64>,
    new_chi: Vec<C64>,
}

impl StepScratch {
    pub(crate) fn new(n_ch: usize, sys_dim: usize, env_dim: usize) -> Self {
        let zero = C64::new(0.0, 0.0);
        Self {
            xs: vec![0.0; n_ch],
            sample: vec![(zero, zero); n_ch],
            transform: vec![ChannelTransform::Scaled { scaling: 1.0, phase: 0.0 }; n_ch],
            sys_vecs: vec![vec![zero; sys_dim]; n_ch],
            env_vecs: vec![vec![zero; env_dim]; n_ch],
            env_adj_vecs: vec![vec![zero; env_dim]; n_ch],
            sys_tmp: vec![zero; sys_dim],
            mean_a: vec![zero; n_ch],
            mean_b: vec![zero; n_ch],
            m2_a: vec![0.0; n_ch],
            m2_b: vec![0.0; n_ch],
            cf_a: vec![0.0; n_ch],
            cf_b: vec![0.0; n_ch],
            new_phi: vec![zero; sys_dim],
            new_chi: vec![zero; env_dim],
        }
    }
}

fn axpy(coeff: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += coeff * *xi;
    }
}

// ---------------------------------------------------------------------------
// Step cores (single source of the update arithmetic)
// ---------------------------------------------------------------------------

/// Plain update of both factors of one member. `sample` holds the final
/// (possibly transformed) noise coefficients.
pub(crate) fn plain_step_core(
    prep: &Prepared<'_>,
    phi: &[C64],
    chi: &[C64],
    sample: &[(C64, C64)],
    gamma: C64,
    new_phi: &mut Vec<C64>,
    new_chi: &mut Vec<C64>,
) {
    new_phi.clear();
    new_phi.extend_from_slice(phi);
    new_chi.clear();
    new_chi.extend_from_slice(chi);
    let zero = C64::new(0.0, 0.0);
    for (ch, &(a, b)) in prep.h.channels().iter().zip(sample) {
        if a != zero {
            ch.system_op().apply_scaled_acc(phi, gamma * a, new_phi);
        }
        if b != zero {
            ch.env_op().apply_scaled_acc(chi, gamma * b, new_chi);
        }
    }
}

/// Mean-field update of both factors of one member: centered noise plus the
/// deterministic drift. Written entirely in centered coupling vectors:
///
/// ```text
///   |Phi'> = (1 - i (dt/2) s) |Phi> + sum_alpha (gamma a_alpha - i dt <B_alpha>) |s'_alpha>,
///   |s'_alpha> = (A_alpha - <A_alpha>) |Phi>,
/// ```
///
/// and symmetrically for the environment. A zeroed noise coefficient
/// (dropped channel) removes only the stochastic part; the drift survives.
#[allow(clippy::too_many_arguments)]
pub(crate) fn mean_field_step_core(
    prep: &Prepared<'_>,
    phi: &[C64],
    chi: &[C64],
    n_phi: f64,
    n_chi: f64,
    sample: &[(C64, C64)],
    gamma: C64,
    dt: f64,
    scratch: &mut StepScratch,
) {
    let n_ch = prep.h.channel_count();
    for (k, ch) in prep.h.channels().iter().enumerate() {
        ch.system_op().apply_into(phi, &mut scratch.sys_vecs[k]);
        scratch.mean_a[k] = dot_slice(phi, &scratch.sys_vecs[k]) / n_phi;
        ch.env_op().apply_into(chi, &mut scratch.env_vecs[k]);
        scratch.mean_b[k] = dot_slice(chi, &scratch.env_vecs[k]) / n_chi;
    }
    let scalar: C64 = (0..n_ch).map(|k| scratch.mean_a[k] * scratch.mean_b[k]).sum();
    for k in 0..n_ch {
        let ma = scratch.mean_a[k];
        axpy(-ma, phi, &mut scratch.sys_vecs[k]);
        let mb = scratch.mean_b[k];
        axpy(-mb, chi, &mut scratch.env_vecs[k]);
    }
    let drift = C64::new(0.0, -dt); // dt / (i hbar), exactly
    let head = C64::new(1.0, 0.0) + drift * scalar * 0.5;
    scratch.new_phi.clear();
    scratch.new_phi.extend(phi.iter().map(|&v| head * v));
    scratch.new_chi.clear();
    scratch.new_chi.extend(chi.iter().map(|&v| head * v));
    for k in 0..n_ch {
        let (a, b) = sample[k];
        axpy(gamma * a + drift * scratch.mean_b[k], &scratch.sys_vecs[k], &mut scratch.new_phi);
        axpy(gamma * b + drift * scratch.mean_a[k], &scratch.env_vecs[k], &mut scratch.new_chi);
    }
}

/// Fused per-step transform computation. Fills `scratch.transform`; clobbers
/// the moment and vector buffers.
pub(crate) fn adaptive_transform_core(
    prep: &Prepared<'_>,
    scheme: SchemeKind,
    phi: &[C64],
    chi: &[C64],
    n_phi: f64,
    n_chi: f64,
    scratch: &mut StepScratch,
) {
    let n_ch = prep.h.channel_count();
    for (k, ch) in prep.h.channels().iter().enumerate() {
        ch.system_op().apply_into(phi, &mut scratch.sys_vecs[k]);
        scratch.m2_a[k] = norm_sqr_slice(&scratch.sys_vecs[k]) / n_phi;
        scratch.mean_a[k] = dot_slice(phi, &scratch.sys_vecs[k]) / n_phi;
        ch.env_op().apply_into(chi, &mut scratch.env_vecs[k]);
        scratch.m2_b[k] = norm_sqr_slice(&scratch.env_vecs[k]) / n_chi;
        scratch.mean_b[k] = dot_slice(chi, &scratch.env_vecs[k]) / n_chi;
    }
    match scheme {
        SchemeKind::Osse => {
            for k in 0..n_ch {
                if scratch.m2_a[k] <= CHANNEL_INACTIVE_RTOL * prep.sys_frob_sq[k]
                    || scratch.m2_b[k] <= CHANNEL_INACTIVE_RTOL * prep.env_frob_sq[k]
                {
                    scratch.transform[k] = ChannelTransform::Dropped;
                    continue;
                }
                let scaling = (scratch.m2_b[k] / scratch.m2_a[k]).sqrt();
                let z = scratch.mean_a[k] * scratch.mean_b[k].conj();
                let phase = phase_from_product(z, (prep.sys_frob_sq[k] * prep.env_frob_sq[k]).sqrt());
                scratch.transform[k] = ChannelTransform::Scaled { scaling, phase };
            }
        }
        SchemeKind::Osmf => {
            // centered second moments and centered Frobenius norms
            // |A - <A> I|_F^2 = |A|_F^2 - 2 Re(<A>* tr A) + dim |<A>|^2
            let sys_dim = prep.h.system_dim() as f64;
            let env_dim = prep.h.env_dim() as f64;
            for k in 0..n_ch {
                let ma = scratch.mean_a[k];
                let mb = scratch.mean_b[k];
                scratch.m2_a[k] = (scratch.m2_a[k] - ma.norm_sqr()).max(0.0);
                scratch.m2_b[k] = (scratch.m2_b[k] - mb.norm_sqr()).max(0.0);
                scratch.cf_a[k] = (prep.sys_frob_sq[k] - 2.0 * (ma.conj() * prep.sys_trace[k]).re
                    + sys_dim * ma.norm_sqr())
                .max(0.0);
                scratch.cf_b[k] = (prep.env_frob_sq[k] - 2.0 * (mb.conj() * prep.env_trace[k]).re
                    + env_dim * mb.norm_sqr())
                .max(0.0);
                axpy(-ma, phi, &mut scratch.sys_vecs[k]);
                axpy(-mb, chi, &mut scratch.env_vecs[k]);
            }
            // d_alpha = (B_alpha - <B_alpha>)^dag applied to the centered
            // environment coupling vector
            for k in 0..n_ch {
                prep.env_adjoint[k].apply_into(&scratch.env_vecs[k], &mut scratch.env_adj_vecs[k]);
                let mbc = scratch.mean_b[k].conj();
                // split borrow: the source and target buffers are distinct fields
                let (src, dst) = (&scratch.env_vecs[k], &mut scratch.env_adj_vecs[k]);
                axpy(-mbc, src, dst);
            }
            let scale_sum: f64 = (0..n_ch).map(|k| scratch.cf_a[k] * scratch.cf_b[k]).sum();
            for beta in 0..n_ch {
                if scratch.m2_a[beta] <= CHANNEL_INACTIVE_RTOL * scratch.cf_a[beta]
                    || scratch.m2_b[beta] <= CHANNEL_INACTIVE_RTOL * scratch.cf_b[beta]
                {
                    scratch.transform[beta] = ChannelTransform::Dropped;
                    continue;
                }
                let scaling = (scratch.m2_b[beta] / scratch.m2_a[beta]).sqrt();
                let mut w = C64::new(0.0, 0.0);
                for (alpha, ch) in prep.h.channels().iter().enumerate() {
                    ch.system_op().apply_into(&scratch.sys_vecs[beta], &mut scratch.sys_tmp);
                    let f = (dot_slice(&scratch.sys_vecs[alpha], &scratch.sys_tmp)
                        - scratch.mean_a[alpha] * dot_slice(&scratch.sys_vecs[alpha], &scratch.sys_vecs[beta]))
                        / n_phi;
                    let g = dot_slice(&scratch.env_vecs[beta], &scratch.env_adj_vecs[alpha]) / n_chi;
                    w += f * g;
                }
                let scale = scale_sum * (scratch.cf_a[beta] * scratch.cf_b[beta]).sqrt();
                let phase = phase_from_product(w, scale);
                scratch.transform[beta] = ChannelTransform::Scaled { scaling, phase };
            }
        }
        SchemeKind::Sse | SchemeKind::Smf => {
            for t in scratch.transform.iter_mut() {
                *t = ChannelTransform::Scaled { scaling: 1.0, phase: 0.0 };
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Public single-step operations (composable route)
// ---------------------------------------------------------------------------

fn check_step_inputs(
    state: &ProductState,
    h: &InteractionHamiltonian,
    noise: &NoiseSample,
) -> Result<(f64, f64)> {
    if state.system.dim() != h.system_dim() {
        return Err(Error::DimensionMismatch {
            expected: h.system_dim(),
            actual: state.system.dim(),
            context: "step system dimension",
        });
    }
    if state.environment.dim() != h.env_dim() {
        return Err(Error::DimensionMismatch {
            expected: h.env_dim(),
            actual: state.environment.dim(),
            context: "step environment dimension",
        });
    }
    if noise.channel_count() != h.channel_count() {
        return Err(Error::DimensionMismatch {
            expected: h.channel_count(),
            actual: noise.channel_count(),
            context: "step noise channel count",
        });
    }
    let n_phi = state.system.norm_sqr();
    let n_chi = state.environment.norm_sqr();
    if !(n_phi.is_finite() && n_phi >= DEAD_NORM_FLOOR && n_chi.is_finite() && n_chi >= DEAD_NORM_FLOOR) {
        return Err(Error::DeadTrajectory);
    }
    Ok((n_phi, n_chi))
}

/// One plain stochastic step of a single member. The noise sample carries
/// whatever transform the caller chose; base noise gives the plain scheme.
pub fn sse_step(
    state: &ProductState,
    h: &InteractionHamiltonian,
    params: &IntegrationParams,
    noise: &NoiseSample,
) -> Result<ProductState> {
    check_step_inputs(state, h, noise)?;
    let prep = Prepared::new(h);
    let mut new_phi = Vec::new();
    let mut new_chi = Vec::new();
    plain_step_core(
        &prep,
        state.system.amplitudes(),
        state.environment.amplitudes(),
        noise.pairs(),
        params.gamma(),
        &mut new_phi,
        &mut new_chi,
    );
    ProductState::new(StateVector::new(new_phi)?, StateVector::new(new_chi)?)
}

/// One mean-field step of a single member: centered noise operators plus the
/// mean-field drift on both factors.
pub fn smf_step(
    state: &ProductState,
    h: &InteractionHamiltonian,
    params: &IntegrationParams,
    noise: &NoiseSample,
) -> Result<ProductState> {
    let (n_phi, n_chi) = check_step_inputs(state, h, noise)?;
    let prep = Prepared::new(h);
    let mut scratch = StepScratch::new(h.channel_count(), h.system_dim(), h.env_dim());
    mean_field_step_core(
        &prep,
        state.system.amplitudes(),
        state.environment.amplitudes(),
        n_phi,
        n_chi,
        noise.pairs(),
        params.gamma(),
        params.dt(),
        &mut scratch,
    );
    ProductState::new(StateVector::new(scratch.new_phi)?, StateVector::new(scratch.new_chi)?)
}

/// The per-step noise transform a scheme would apply at the given state:
/// identity for the non-adaptive schemes, optimal scaling and phase for the
/// adaptive ones (computed on centered channels for the mean-field variant,
/// which also switches to the alternative phase rule).
pub fn adaptive_transform(
    h: &InteractionHamiltonian,
    scheme: SchemeKind,
    state: &ProductState,
) -> Result<NoiseTransform> {
    let phi = &state.system;
    let chi = &state.environment;
    match scheme {
        SchemeKind::Sse | SchemeKind::Smf => Ok(NoiseTransform::identity(h.channel_count())),
        SchemeKind::Osse => {
            let mut out = Vec::with_capacity(h.channel_count());
            for ch in h.channels() {
                match stochastic::optimal_scaling_factor(ch, phi, chi, (1.0, 1.0))? {
                    ScalingFactor::Inactive => out.push(ChannelTransform::Dropped),
                    ScalingFactor::Active(scaling) => {
                        let phase = stochastic::optimal_phase_factor(ch, phi, chi)?;
                        out.push(ChannelTransform::Scaled { scaling, phase });
                    }
                }
            }
            NoiseTransform::new(out)
        }
        SchemeKind::Osmf => {
            let centered: Vec<_> = h
                .channels()
                .iter()
                .map(|ch| stochastic::centered_channel(ch, phi, chi))
                .collect::<Result<_>>()?;
            let centered_h = InteractionHamiltonian::new(h.system_dim(), h.env_dim(), centered)?;
            let mut out = Vec::with_capacity(h.channel_count());
            for (beta, ch) in centered_h.channels().iter().enumerate() {
                match stochastic::optimal_scaling_factor(ch, phi, chi, (1.0, 1.0))? {
                    ScalingFactor::Inactive => out.push(ChannelTransform::Dropped),
                    ScalingFactor::Active(scaling) => {
                        let phase = stochastic::alternative_phase_factor(&centered_h, beta, phi, chi)?;
                        out.push(ChannelTransform::Scaled { scaling, phase });
                    }
                }
            }
            NoiseTransform::new(out)
        }
    }
}

// ---------------------------------------------------------------------------
// Fused pair stepper
// ---------------------------------------------------------------------------

struct Member {
    phi: Vec<C64>,
    chi: Vec<C64>,
    n_phi: f64,
    n_chi: f64,
}

impl Member {
    fn from_state(state: &ProductState) -> Self {
        let phi = state.system.amplitudes().to_vec();
        let chi = state.environment.amplitudes().to_vec();
        let n_phi = norm_sqr_slice(&phi);
        let n_chi = norm_sqr_slice(&chi);
        Self { phi, chi, n_phi, n_chi }
    }

    fn to_state(&self) -> ProductState {
        ProductState {
            system: StateVector::from_raw(self.phi.clone()),
            environment: StateVector::from_raw(self.chi.clone()),
        }
    }
}

/// Streaming pair propagator: advances both members step by step without
/// recording history, so ensemble drivers can fold statistics on the fly.
pub(crate) struct PairStepper<'p, 'h> {
    prep: &'p Prepared<'h>,
    scheme: SchemeKind,
    params: IntegrationParams,
    ket: Member,
    bra: Member,
    scratch: StepScratch,
}

impl<'p, 'h> PairStepper<'p, 'h> {
    pub(crate) fn new(
        prep: &'p Prepared<'h>,
        pair: &DyadicPair,
        scheme: SchemeKind,
        params: IntegrationParams,
    ) -> Result<Self> {
        let h = prep.h;
        if pair.ket.system.dim() != h.system_dim() || pair.ket.environment.dim() != h.env_dim() {
            return Err(Error::DimensionMismatch {
                expected: h.total_dim(),
                actual: pair.ket.system.dim() * pair.ket.environment.dim(),
                context: "pair stepper state dimensions",
            });
        }
        let scratch = StepScratch::new(h.channel_count(), h.system_dim(), h.env_dim());
        Ok(Self {
            prep,
            scheme,
            params,
            ket: Member::from_state(&pair.ket),
            bra: Member::from_state(&pair.bra),
            scratch,
        })
    }

    /// Advances both members by one step, each drawing from its own noise
    /// source. On a death error the members keep their last healthy state.
    pub(crate) fn step(
        &mut self,
        ket_noise: &mut impl NoiseSource,
        bra_noise: &mut impl NoiseSource,
    ) -> Result<()> {
        advance_member(self.prep, self.scheme, &self.params, &mut self.ket, ket_noise, &mut self.scratch)?;
        advance_member(self.prep, self.scheme, &self.params, &mut self.bra, bra_noise, &mut self.scratch)
    }

    pub(crate) fn ket_vectors(&self) -> (&[C64], &[C64]) {
        (&self.ket.phi, &self.ket.chi)
    }

    pub(crate) fn bra_vectors(&self) -> (&[C64], &[C64]) {
        (&self.bra.phi, &self.bra.chi)
    }

    /// Squared joint norms `(|member 1|^2, |member 2|^2)`.
    pub(crate) fn joint_norms(&self) -> (f64, f64) {
        (self.ket.n_phi * self.ket.n_chi, self.bra.n_phi * self.bra.n_chi)
    }

    pub(crate) fn current_pair(&self) -> DyadicPair {
        DyadicPair { ket: self.ket.to_state(), bra: self.bra.to_state() }
    }
}

fn advance_member(
    prep: &Prepared<'_>,
    scheme: SchemeKind,
    params: &IntegrationParams,
    member: &mut Member,
    noise: &mut impl NoiseSource,
    scratch: &mut StepScratch,
) -> Result<()> {
    if !(member.n_phi.is_finite()
        && member.n_phi >= DEAD_NORM_FLOOR
        && member.n_chi.is_finite()
        && member.n_chi >= DEAD_NORM_FLOOR)
    {
        return Err(Error::DeadTrajectory);
    }
    let n_ch = prep.h.channel_count();
    // Base noise is always drawn for every channel, dropped or not, so the
    // consumed stream length depends only on the channel count and the
    // step index. That keeps seeded runs reproducible across schemes.
    for x in scratch.xs.iter_mut() {
        *x = noise.standard_normal();
    }
    if scheme.is_adaptive() {
        adaptive_transform_core(prep, scheme, &member.phi, &member.chi, member.n_phi, member.n_chi, scratch);
        for k in 0..n_ch {
            let x = C64::new(scratch.xs[k], 0.0);
            scratch.sample[k] = transform_pair(x, x, scratch.transform[k]);
        }
    } else {
        for k in 0..n_ch {
            let x = C64::new(scratch.xs[k], 0.0);
            scratch.sample[k] = (x, x);
        }
    }
    // The transform pass clobbered the moment buffers; the mean-field core
    // recomputes what it needs from the untouched member vectors.
    let gamma = params.gamma();
    if scheme.is_mean_field() {
        // move the sample buffer out so the core can borrow the rest mutably
        let sample = std::mem::take(&mut scratch.sample);
        mean_field_step_core(
            prep,
            &member.phi,
            &member.chi,
            member.n_phi,
            member.n_chi,
            &sample,
            gamma,
            params.dt(),
            scratch,
        );
        scratch.sample = sample;
    } else {
        plain_step_core(
            prep,
            &member.phi,
            &member.chi,
            &scratch.sample,
            gamma,
            &mut scratch.new_phi,
            &mut scratch.new_chi,
        );
    }
    let n_phi = norm_sqr_slice(&scratch.new_phi);
    let n_chi = norm_sqr_slice(&scratch.new_chi);
    if !(n_phi.is_finite() && n_phi >= DEAD_NORM_FLOOR && n_chi.is_finite() && n_chi >= DEAD_NORM_FLOOR) {
        return Err(Error::DeadTrajectory);
    }
    std::mem::swap(&mut member.phi, &mut scratch.new_phi);
    std::mem::swap(&mut member.chi, &mut scratch.new_chi);
    member.n_phi = n_phi;
    member.n_chi = n_chi;
    Ok(())
}

// ---------------------------------------------------------------------------
// Pair propagation
// ---------------------------------------------------------------------------

/// Propagates a pair over the full time grid, recording the state after every
/// step. The two members draw from their own independent noise sources. A
/// death (norm collapse or non-finite amplitudes) truncates the history and
/// is reported through [`PairTrajectory::died_at_step`].
pub fn propagate_pair(
    pair: &DyadicPair,
    h: &InteractionHamiltonian,
    scheme: SchemeKind,
    params: &IntegrationParams,
    ket_noise: &mut impl NoiseSource,
    bra_noise: &mut impl NoiseSource,
) -> Result<PairTrajectory> {
    let prep = Prepared::new(h);
    let mut stepper = PairStepper::new(&prep, pair, scheme, *params)?;
    let mut states = Vec::with_capacity(params.step_count() + 1);
    states.push(pair.clone());
    let mut died_at_step = None;
    for k in 1..=params.step_count() {
        match stepper.step(ket_noise, bra_noise) {
            Ok(()) => states.push(stepper.current_pair()),
            Err(Error::DeadTrajectory) => {
                died_at_step = Some(k);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(PairTrajectory { states, died_at_step })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
