//! Noise sampling and the gauge freedom that reshapes trajectory statistics.
//!
//! The stochastic factorized dynamics evolves a system factor `|Phi>` and an
//! environment factor `|chi>` with one complex noise pair `(a_alpha, b_alpha)`
//! per coupling channel,
//!
//! ```text
//!   d|Phi> = gamma sum_alpha a_alpha A_alpha |Phi>,
//!   d|chi> = gamma sum_alpha b_alpha B_alpha |chi>,     gamma^2 = dt / (i hbar),
//! ```
//!
//! and the ensemble mean reproduces the exact joint dynamics whenever
//! `E[a_alpha b_alpha] = 1`. That condition pins only the product, leaving a
//! per-channel gauge freedom
//!
//! ```text
//!   a -> e^{i theta} sqrt(u) a,    b -> e^{-i theta} b / sqrt(u),
//! ```
//!
//! which changes nothing in the mean but everything in the variance. This
//! module provides the base sampler (`a = b = x` with `x` standard real
//! Gaussian), the transform machinery, and the closed-form factors that
//! minimize the mean growth of `<Psi|Psi>`:
//!
//! * the scaling `uated = sqrt(<B^dag B>_chi / <A^dag A>_Phi)` balancing the two
//!   factors' second moments (with base noise of unit variance);
//! * the phase `2 theta = pi - arg(<A>_Phi <B^dag>_chi)` that turns the
//!   cross term `2 Re{e^{2 i theta} <A>_Phi <B^dag>_chi}` maximally negative;
//! * an alternative phase choice that instead damps the growth of the
//!   second-moment product `<A^dag A>_Phi <B^dag B>_chi`, the variant used
//!   together with mean-field subtraction.
//!
//! Throughout, expectation values are normalized on the current factors; the
//! base-noise variances are `E[a^2] = E[b^2] = 1` and `E[a b*] = 1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{dot_slice, C64};
use crate::model::{Channel, InteractionHamiltonian};
use crate::linalg::StateVector;
use crate::{Error, Result};

/// Channels whose acting-side second moment falls below
/// `CHANNEL_INACTIVE_RTOL * |op|_F^2` are treated as inactive for the current
/// step: the exact contribution `A|Phi> ⊗ B|chi>` vanishes on the acting
/// side, so dropping the stochastic term on *both* factors is unbiased and
/// avoids the divergent scaling `u -> 0` or `u -> infinity`.
pub const CHANNEL_INACTIVE_RTOL: f64 = 1e-12;

/// Threshold below which an optimizing product (`z` or `w`) counts as zero
/// and the phase convention `theta = 0` applies.
pub const PHASE_DEGENERACY_RTOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Scheme taxonomy
// ---------------------------------------------------------------------------

/// The four stochastic unravelings implemented by the propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Plain factorized dynamics with base noise `a = b = x`.
    Sse,
    /// Plain dynamics with per-step optimal scaling and phase.
    Osse,
    /// Mean-field-subtracted dynamics (centered noise operators) with base noise.
    Smf,
    /// Mean-field-subtracted dynamics with optimal scaling and the
    /// alternative phase choice.
    Osmf,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [SchemeKind::Sse, SchemeKind::Smf, SchemeKind::Osse, SchemeKind::Osmf];

    /// Whether the scheme subtracts the mean-field before injecting noise.
    pub fn is_mean_field(&self) -> bool {
        matches!(self, SchemeKind::Smf | SchemeKind::Osmf)
    }

    /// Whether the scheme recomputes an optimal noise transform every step.
    pub fn is_adaptive(&self) -> bool {
        matches!(self, SchemeKind::Osse | SchemeKind::Osmf)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemeKind::Sse => "sse",
            SchemeKind::Osse => "osse",
            SchemeKind::Smf => "smf",
            SchemeKind::Osmf => "osmf",
        };
        f.write_str(s)
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sse" => Ok(SchemeKind::Sse),
            "osse" => Ok(SchemeKind::Osse),
            "smf" => Ok(SchemeKind::Smf),
            "osmf" => Ok(SchemeKind::Osmf),
            other => Err(Error::InvalidParameter(format!(
                "unknown scheme '{other}' (expected sse, osse, smf or osmf)"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Noise sources and samples
// ---------------------------------------------------------------------------

/// Anything that can hand out standard normal variates. Implemented for every
/// [`rand::Rng`]; tests substitute deterministic or level-coupled sources.
pub trait NoiseSource {
    fn standard_normal(&mut self) -> f64;
}

impl<R: Rng> NoiseSource for R {
    fn standard_normal(&mut self) -> f64 {
        self.sample(StandardNormal)
    }
}

/// One noise realization: the complex pair `(a_alpha, b_alpha)` per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSample {
    pairs: Vec<(C64, C64)>,
}

impl NoiseSample {
    pub fn new(pairs: Vec<(C64, C64)>) -> Self {
        Self { pairs }
    }

    pub fn channel_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair(&self, alpha: usize) -> (C64, C64) {
        self.pairs[alpha]
    }

    pub fn pairs(&self) -> &[(C64, C64)] {
        &self.pairs
    }
}

/// Draws the base noise `a_alpha = b_alpha = x_alpha` with `x_alpha` i.i.d.
/// standard real Gaussians, consuming exactly `channel_count` variates from
/// the source in channel order.
pub fn sample_base_noise(channel_count: usize, source: &mut impl NoiseSource) -> NoiseSample {
    let pairs = (0..channel_count)
        .map(|_| {
            let x = source.standard_normal();
            let z = C64::new(x, 0.0);
            (z, z)
        })
        .collect();
    NoiseSample { pairs }
}

// ---------------------------------------------------------------------------
// Noise transforms
// ---------------------------------------------------------------------------

/// Per-channel gauge element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelTransform {
    /// `a -> e^{i phase} sqrt(scaling) a`, `b -> e^{-i phase} b / sqrt(scaling)`.
    Scaled { scaling: f64, phase: f64 },
    /// Channel inactive this step: both noise components are zeroed. Only
    /// valid when the acting-side second moment vanishes (the exact
    /// contribution is zero), which keeps the zeroing unbiased.
    Dropped,
}

/// A full per-channel gauge transform. The product `a_alpha * b_alpha` is
/// invariant channel by channel on scaled entries, so the ensemble mean of
/// the dynamics is untouched by any choice made here.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTransform {
    channels: Vec<ChannelTransform>,
}

impl NoiseTransform {
    pub fn new(channels: Vec<ChannelTransform>) -> Result<Self> {
        for (k, t) in channels.iter().enumerate() {
            if let ChannelTransform::Scaled { scaling, phase } = t {
                if !(scaling.is_finite() && *scaling > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "channel {k}: scaling factor must be positive and finite, got {scaling}"
                    )));
                }
                if !phase.is_finite() {
                    return Err(Error::InvalidParameter(format!("channel {k}: non-finite phase")));
                }
            }
        }
        Ok(Self { channels })
    }

    /// The trivial transform `u = 1, theta = 0` on every channel.
    pub fn identity(channel_count: usize) -> Self {
        Self {
            channels: vec![ChannelTransform::Scaled { scaling: 1.0, phase: 0.0 }; channel_count],
        }
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, alpha: usize) -> ChannelTransform {
        self.channels[alpha]
    }

    pub fn channels(&self) -> &[ChannelTransform] {
        &self.channels
    }
}

/// Applies the gauge transform channel by channel.
pub fn apply_noise_transform(sample: &NoiseSample, transform: &NoiseTransform) -> Result<NoiseSample> {
    if sample.channel_count() != transform.channel_count() {
        return Err(Error::DimensionMismatch {
            expected: transform.channel_count(),
            actual: sample.channel_count(),
            context: "noise transform channel count",
        });
    }
    let pairs = sample
        .pairs
        .iter()
        .zip(&transform.channels)
        .map(|(&(a, b), t)| transform_pair(a, b, *t))
        .collect();
    Ok(NoiseSample { pairs })
}

pub(crate) fn transform_pair(a: C64, b: C64, t: ChannelTransform) -> (C64, C64) {
    match t {
        ChannelTransform::Scaled { scaling, phase } => {
            let root = scaling.sqrt();
            let rot = C64::from_polar(1.0, phase);
            (rot * root * a, rot.conj() * b / root)
        }
        ChannelTransform::Dropped => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
    }
}

// ---------------------------------------------------------------------------
// Optimal factors
// ---------------------------------------------------------------------------

/// Outcome of the scaling optimization for a single channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingFactor {
    Active(f64),
    /// Acting-side second moment numerically zero; see
    /// [`CHANNEL_INACTIVE_RTOL`].
    Inactive,
}

impl ScalingFactor {
    pub fn is_active(&self) -> bool {
        matches!(self, ScalingFactor::Active(_))
    }
}

/// Scaling that minimizes the diagonal part of the mean norm growth,
///
/// ```text
///   Omega(u) = u var_a <A^dag A>_Phi + (1/u) var_b <B^dag B>_chi,
///   u* = [ (var_b / var_a) <B^dag B>_chi / <A^dag A>_Phi ]^(1/2),
/// ```
///
/// where `(var_a, var_b)` are the base-noise variances (`(1, 1)` for the
/// standard sampler). Returns [`ScalingFactor::Inactive`] when either second
/// moment is numerically zero.
pub fn optimal_scaling_factor(
    channel: &Channel,
    phi: &StateVector,
    chi: &StateVector,
    base_variances: (f64, f64),
) -> Result<ScalingFactor> {
    let (var_a, var_b) = base_variances;
    if !(var_a.is_finite() && var_a > 0.0 && var_b.is_finite() && var_b > 0.0) {
        return Err(Error::InvalidParameter("base-noise variances must be positive".into()));
    }
    let m2_a = crate::linalg::normalized_second_moment(channel.system_op(), phi)?;
    let m2_b = crate::linalg::normalized_second_moment(channel.env_op(), chi)?;
    if m2_a <= CHANNEL_INACTIVE_RTOL * channel.system_op().frobenius_norm_sqr()
        || m2_b <= CHANNEL_INACTIVE_RTOL * channel.env_op().frobenius_norm_sqr()
    {
        return Ok(ScalingFactor::Inactive);
    }
    Ok(ScalingFactor::Active(((var_b / var_a) * m2_b / m2_a).sqrt()))
}

/// Wraps an angle into `(-pi, pi]`.
pub(crate) fn wrap_phase(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = theta % two_pi;
    if t > std::f64::consts::PI {
        t -= two_pi;
    } else if t <= -std::f64::consts::PI {
        t += two_pi;
    }
    t
}

pub(crate) fn phase_from_product(z: C64, scale: f64) -> f64 {
    if z.norm() <= PHASE_DEGENERACY_RTOL * scale {
        0.0
    } else {
        wrap_phase((std::f64::consts::PI - z.arg()) / 2.0)
    }
}

/// Phase minimizing the cross term of the mean norm growth,
/// `Gamma(theta) = 2 Re{ e^{2 i theta} <A>_Phi <B^dag>_chi }`:
/// with `z = <A>_Phi <B^dag>_chi = |z| e^{i theta_AB}`, the minimum
/// `Gamma = -2 |z|` sits at `2 theta = pi - theta_AB`. Returns the convention
/// `theta = 0` when `|z|` is numerically zero; the result lies in `(-pi, pi]`.
pub fn optimal_phase_factor(channel: &Channel, phi: &StateVector, chi: &StateVector) -> Result<f64> {
    let mean_a = crate::linalg::normalized_expectation(channel.system_op(), phi)?;
    let mean_b = crate::linalg::normalized_expectation(channel.env_op(), chi)?;
    let z = mean_a * mean_b.conj();
    let scale = (channel.system_op().frobenius_norm_sqr() * channel.env_op().frobenius_norm_sqr()).sqrt();
    Ok(phase_from_product(z, scale))
}

/// Alternative phase choice for channel `beta`: instead of the norm cross
/// term (which the mean-field subtraction already cancels), damp the drift of
/// the per-channel second-moment products by minimizing
///
/// ```text
///   sum_alpha Re{ e^{2 i theta_beta} <A_alpha^dag A_alpha A_beta>_Phi
///                                    <B_beta^dag B_alpha^dag B_alpha>_chi },
/// ```
///
/// i.e. `theta_beta = (pi - arg w) / 2` with `w` the summed product above.
/// The channel operators are used exactly as stored: for the mean-field
/// scheme the caller passes centered channels.
pub fn alternative_phase_factor(
    h: &InteractionHamiltonian,
    beta: usize,
    phi: &StateVector,
    chi: &StateVector,
) -> Result<f64> {
    if beta >= h.channel_count() {
        return Err(Error::InvalidParameter(format!(
            "channel index {beta} out of range for {} channels",
            h.channel_count()
        )));
    }
    let n_phi = phi.norm_sqr();
    let n_chi = chi.norm_sqr();
    if !(n_phi.is_finite() && n_phi > f64::MIN_POSITIVE && n_chi.is_finite() && n_chi > f64::MIN_POSITIVE) {
        return Err(Error::ZeroNormState);
    }
    let ch_beta = &h.channels()[beta];
    let a_beta_phi = ch_beta.system_op().apply(phi)?;
    let b_beta_chi = ch_beta.env_op().apply(chi)?;
    let mut w = C64::new(0.0, 0.0);
    let mut scale_sum = 0.0;
    for ch in h.channels() {
        // <A^dag_a A_a A_b>_Phi = <A_a Phi | A_a (A_b Phi)>
        let a_alpha_phi = ch.system_op().apply(phi)?;
        let a_ab = ch.system_op().apply(&a_beta_phi)?;
        let f = dot_slice(a_alpha_phi.amplitudes(), a_ab.amplitudes()) / n_phi;
        // <B^dag_b B^dag_a B_a>_chi = <B_b chi | B^dag_a (B_a chi)>
        let b_alpha_chi = ch.env_op().apply(chi)?;
        let b_ad = ch.env_op().adjoint().apply(&b_alpha_chi)?;
        let g = dot_slice(b_beta_chi.amplitudes(), b_ad.amplitudes()) / n_chi;
        w += f * g;
        scale_sum += ch.system_op().frobenius_norm_sqr() * ch.env_op().frobenius_norm_sqr();
    }
    let scale = scale_sum
        * (ch_beta.system_op().frobenius_norm_sqr() * ch_beta.env_op().frobenius_norm_sqr()).sqrt();
    Ok(phase_from_product(w, scale))
}

/// Builds the channel with both operators centered on the current factors:
/// `A -> A - <A>_Phi I`, `B -> B - <B>_chi I`.
pub fn centered_channel(channel: &Channel, phi: &StateVector, chi: &StateVector) -> Result<Channel> {
    let mean_a = crate::linalg::normalized_expectation(channel.system_op(), phi)?;
    let mean_b = crate::linalg::normalized_expectation(channel.env_op(), chi)?;
    Ok(Channel::new(
        channel.system_op().shifted(mean_a),
        channel.env_op().shifted(mean_b),
    ))
}

// ---------------------------------------------------------------------------
// Predicted norm growth
// ---------------------------------------------------------------------------

/// Growth contribution of one channel along the fluctuation-optimal path:
/// `F = sqrt(<A^dag A>_Phi <B^dag B>_chi) - |<A>_Phi| |<B>_chi|`.
pub fn optimal_fluctuation_term(channel: &Channel, phi: &StateVector, chi: &StateVector) -> Result<f64> {
    let m2_a = crate::linalg::normalized_second_moment(channel.system_op(), phi)?;
    let m2_b = crate::linalg::normalized_second_moment(channel.env_op(), chi)?;
    let mean_a = crate::linalg::normalized_expectation(channel.system_op(), phi)?;
    let mean_b = crate::linalg::normalized_expectation(channel.env_op(), chi)?;
    Ok((m2_a * m2_b).sqrt() - mean_a.norm() * mean_b.norm())
}

/// Mean-field analogue of [`optimal_fluctuation_term`]:
/// `F_MF = sqrt(Var_Phi(A) Var_chi(B))` with
/// `Var(O) = <O^dag O> - |<O>|^2`. Always bounded above by the uncentered
/// term, which is what makes the combined scheme the least noisy.
pub fn mean_field_fluctuation_term(channel: &Channel, phi: &StateVector, chi: &StateVector) -> Result<f64> {
    let m2_a = crate::linalg::normalized_second_moment(channel.system_op(), phi)?;
    let m2_b = crate::linalg::normalized_second_moment(channel.env_op(), chi)?;
    let mean_a = crate::linalg::normalized_expectation(channel.system_op(), phi)?;
    let mean_b = crate::linalg::normalized_expectation(channel.env_op(), chi)?;
    let var_a = (m2_a - mean_a.norm_sqr()).max(0.0);
    let var_b = (m2_b - mean_b.norm_sqr()).max(0.0);
    Ok((var_a * var_b).sqrt())
}

/// Deterministic prediction of `d<Psi|Psi> / dt / <Psi|Psi>` for one pair
/// member under the given scheme and noise transform, assuming the base
/// sampler (`E[a^2] = E[b^2] = E[a b*] = 1`). Per channel:
///
/// * plain schemes: `u <A^dag A> + (1/u) <B^dag B>
///   + 2 Re{ e^{2 i theta} <A> <B^dag> }`, dropped channels contribute 0;
/// * mean-field with base noise: the same diagonal terms with centered
///   moments (the cross term vanishes because centered means are zero);
/// * optimized mean-field: `2 sqrt(Var(A) Var(B))`, the value attained at the
///   optimal scaling, independent of the phase.
pub fn predicted_norm_growth(
    h: &InteractionHamiltonian,
    phi: &StateVector,
    chi: &StateVector,
    transform: &NoiseTransform,
    scheme: SchemeKind,
) -> Result<f64> {
    if transform.channel_count() != h.channel_count() {
        return Err(Error::DimensionMismatch {
            expected: h.channel_count(),
            actual: transform.channel_count(),
            context: "predicted growth transform channel count",
        });
    }
    let mut rate = 0.0;
    for (ch, t) in h.channels().iter().zip(transform.channels()) {
        match scheme {
            SchemeKind::Sse | SchemeKind::Osse => {
                let ChannelTransform::Scaled { scaling, phase } = *t else { continue };
                let m2_a = crate::linalg::normalized_second_moment(ch.system_op(), phi)?;
                let m2_b = crate::linalg::normalized_second_moment(ch.env_op(), chi)?;
                let mean_a = crate::linalg::normalized_expectation(ch.system_op(), phi)?;
                let mean_b = crate::linalg::normalized_expectation(ch.env_op(), chi)?;
                let z = mean_a * mean_b.conj();
                let cross = 2.0 * (C64::from_polar(1.0, 2.0 * phase) * z).re;
                rate += scaling * m2_a + m2_b / scaling + cross;
            }
            SchemeKind::Smf => {
                let ChannelTransform::Scaled { scaling, .. } = *t else { continue };
                let m2_a = crate::linalg::normalized_second_moment(ch.system_op(), phi)?;
                let m2_b = crate::linalg::normalized_second_moment(ch.env_op(), chi)?;
                let mean_a = crate::linalg::normalized_expectation(ch.system_op(), phi)?;
                let mean_b = crate::linalg::normalized_expectation(ch.env_op(), chi)?;
                let var_a = (m2_a - mean_a.norm_sqr()).max(0.0);
                let var_b = (m2_b - mean_b.norm_sqr()).max(0.0);
                rate += scaling * var_a + var_b / scaling;
            }
            SchemeKind::Osmf => {
                rate += 2.0 * mean_field_fluctuation_term(ch, phi, chi)?;
            }
        }
    }
    Ok(rate)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
