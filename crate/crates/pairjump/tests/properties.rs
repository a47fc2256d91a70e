//! Property-based checks of the stochastic-calculus invariants: the noise
//! gauge, optimality of the adaptive factors, the fluctuation-term ordering,
//! and the tensor-index conventions they all rest on.

use proptest::prelude::*;

use pairjump::linalg::{
    normalized_expectation, normalized_second_moment, tensor_product, Operator, StateVector, C64,
};
use pairjump::model::{Channel, InteractionHamiltonian};
use pairjump::stochastic::{
    apply_noise_transform, mean_field_fluctuation_term, optimal_fluctuation_term,
    optimal_phase_factor, optimal_scaling_factor, predicted_norm_growth, ChannelTransform,
    NoiseSample, NoiseTransform, ScalingFactor, SchemeKind,
};

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

fn complex() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| C64::new(re, im))
}

/// State vector with a norm bounded away from zero.
fn state(dim: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(complex(), dim)
        .prop_filter("state norm too small", |amps| {
            amps.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-2
        })
        .prop_map(|amps| StateVector::new(amps).expect("finite amplitudes"))
}

/// Operator with a Frobenius norm bounded away from zero.
fn operator(dim: usize) -> impl Strategy<Value = Operator> {
    prop::collection::vec(complex(), dim * dim)
        .prop_filter("operator too small", |es| {
            es.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-2
        })
        .prop_map(move |es| Operator::from_entries(dim, es).expect("finite entries"))
}

fn channel(sys_dim: usize, env_dim: usize) -> impl Strategy<Value = Channel> {
    (operator(sys_dim), operator(env_dim)).prop_map(|(a, b)| Channel::new(a, b))
}

// ---------------------------------------------------------------------------
// Noise gauge
// ---------------------------------------------------------------------------

proptest! {
    /// The per-channel transform `a -> e^{i theta} sqrt(u) a`,
    /// `b -> e^{-i theta} b / sqrt(u)` leaves the product `a b` unchanged:
    /// this is the gauge freedom every adaptive scheme exploits.
    #[test]
    fn gauge_transform_preserves_noise_products(
        a in complex(),
        b in complex(),
        log_u in -6.0..6.0f64,
        phase in -3.1..3.1f64,
    ) {
        let sample = NoiseSample::new(vec![(a, b)]);
        let transform = NoiseTransform::new(vec![ChannelTransform::Scaled {
            scaling: log_u.exp(),
            phase,
        }])
        .expect("valid transform");
        let out = apply_noise_transform(&sample, &transform).expect("apply");
        let (ap, bp) = out.pair(0);
        let before = a * b;
        let after = ap * bp;
        let tol = 1e-13 * (1.0 + before.norm());
        prop_assert!(
            (after - before).norm() <= tol,
            "product drifted: {before} -> {after}"
        );
    }

    /// A dropped channel zeroes both noise coefficients.
    #[test]
    fn dropped_channels_silence_the_noise(a in complex(), b in complex()) {
        let sample = NoiseSample::new(vec![(a, b)]);
        let transform = NoiseTransform::new(vec![ChannelTransform::Dropped]).expect("valid");
        let out = apply_noise_transform(&sample, &transform).expect("apply");
        prop_assert_eq!(out.pair(0), (C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    }
}

// ---------------------------------------------------------------------------
// Optimality of the adaptive factors
// ---------------------------------------------------------------------------

/// Predicted growth for a single-channel model under a given `(u, theta)`.
fn growth_at(ch: &Channel, phi: &StateVector, chi: &StateVector, u: f64, theta: f64) -> f64 {
    let h = InteractionHamiltonian::new(ch.system_op().dim(), ch.env_op().dim(), vec![ch.clone()])
        .expect("consistent dims");
    let transform =
        NoiseTransform::new(vec![ChannelTransform::Scaled { scaling: u, phase: theta }])
            .expect("valid");
    predicted_norm_growth(&h, phi, chi, &transform, SchemeKind::Sse).expect("finite growth")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// The adaptive scaling and phase minimize the predicted norm growth:
    /// any multiplicative perturbation of `u` or additive shift of `theta`
    /// can only grow it.
    #[test]
    fn adaptive_factors_minimize_predicted_growth(
        ch in channel(2, 3),
        phi in state(2),
        chi in state(3),
        u_factor in prop::sample::select(vec![0.25f64, 0.7, 1.3, 4.0]),
        d_theta in prop::sample::select(vec![-1.3f64, -0.4, 0.4, 1.0, std::f64::consts::FRAC_PI_2]),
    ) {
        let scaling = optimal_scaling_factor(&ch, &phi, &chi, (1.0, 1.0)).expect("finite");
        let ScalingFactor::Active(u_opt) = scaling else {
            // Degenerate channel on this state: nothing to optimize.
            return Ok(());
        };
        let theta_opt = optimal_phase_factor(&ch, &phi, &chi).expect("finite");
        let here = growth_at(&ch, &phi, &chi, u_opt, theta_opt);
        let tol = 1e-9 * (1.0 + here.abs());
        let there_u = growth_at(&ch, &phi, &chi, u_opt * u_factor, theta_opt);
        prop_assert!(here <= there_u + tol, "scaling not optimal: {here} > {there_u}");
        let there_t = growth_at(&ch, &phi, &chi, u_opt, theta_opt + d_theta);
        prop_assert!(here <= there_t + tol, "phase not optimal: {here} > {there_t}");
        let there_both = growth_at(&ch, &phi, &chi, u_opt * u_factor, theta_opt + d_theta);
        prop_assert!(here <= there_both + tol, "joint not optimal: {here} > {there_both}");
    }

    /// Fluctuation-term ordering: centering can only lower the per-channel
    /// growth contribution, `F >= F_MF >= 0`.
    #[test]
    fn centered_fluctuation_terms_never_exceed_uncentered(
        ch in channel(3, 2),
        phi in state(3),
        chi in state(2),
    ) {
        let f = optimal_fluctuation_term(&ch, &phi, &chi).expect("finite");
        let fmf = mean_field_fluctuation_term(&ch, &phi, &chi).expect("finite");
        let scale = 1.0 + f.abs() + fmf.abs();
        prop_assert!(fmf >= 0.0);
        prop_assert!(f + 1e-12 * scale >= fmf, "ordering violated: F={f} < F_MF={fmf}");
        prop_assert!(
            f * f - fmf * fmf >= -1e-10 * scale * scale,
            "squared ordering violated: F^2={} < F_MF^2={}",
            f * f,
            fmf * fmf
        );
    }

    /// The optimal-path growth `2F` is what the fully adaptive plain scheme
    /// predicts at its own optimum.
    #[test]
    fn optimal_growth_equals_twice_the_fluctuation_term(
        ch in channel(2, 2),
        phi in state(2),
        chi in state(2),
    ) {
        let scaling = optimal_scaling_factor(&ch, &phi, &chi, (1.0, 1.0)).expect("finite");
        let ScalingFactor::Active(u_opt) = scaling else {
            return Ok(());
        };
        let theta_opt = optimal_phase_factor(&ch, &phi, &chi).expect("finite");
        let growth = growth_at(&ch, &phi, &chi, u_opt, theta_opt);
        let f = optimal_fluctuation_term(&ch, &phi, &chi).expect("finite");
        let tol = 1e-9 * (1.0 + growth.abs());
        prop_assert!(
            (growth - 2.0 * f).abs() <= tol,
            "optimal growth {growth} != 2F = {}",
            2.0 * f
        );
    }
}

// ---------------------------------------------------------------------------
// Tensor-index conventions
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// `(A kron B)(u tensor v) = (A u) tensor (B v)` with the system factor on
    /// the slow index — the convention the whole pair representation rests on.
    #[test]
    fn kronecker_action_factorizes(
        a in operator(2),
        b in operator(3),
        u in state(2),
        v in state(3),
    ) {
        let joint = a.kron(&b).apply(&tensor_product(&u, &v)).expect("apply");
        let separate = tensor_product(&a.apply(&u).expect("au"), &b.apply(&v).expect("bv"));
        let scale: f64 = 1.0 + separate.amplitudes().iter().map(|z| z.norm()).sum::<f64>();
        for (x, y) in joint.amplitudes().iter().zip(separate.amplitudes()) {
            prop_assert!((x - y).norm() <= 1e-12 * scale, "kron mismatch: {x} vs {y}");
        }
    }

    /// Adjoint is an involution and transposes expectation values:
    /// `<v|M|w> = conj(<w|M^dag|v>)`.
    #[test]
    fn adjoint_involution_and_expectation_symmetry(
        m in operator(3),
        v in state(3),
        w in state(3),
    ) {
        let back = m.adjoint().adjoint();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((back.entry(i, j) - m.entry(i, j)).norm() <= 1e-15);
            }
        }
        let lhs = pairjump::linalg::inner_product(&v, &m.apply(&w).expect("mw")).expect("ip");
        let rhs = pairjump::linalg::inner_product(&w, &m.adjoint().apply(&v).expect("mv"))
            .expect("ip")
            .conj();
        let scale = 1.0 + lhs.norm();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale, "{lhs} vs {rhs}");
    }

    /// The second moment is consistent with the expectation of the shifted
    /// operator: `<(M - z)^dag (M - z)> = <M^dag M> - 2 Re(conj(z) <M>) + |z|^2`.
    #[test]
    fn shifted_second_moment_expands_correctly(
        m in operator(2),
        v in state(2),
        z in complex(),
    ) {
        let direct = normalized_second_moment(&m.shifted(z), &v).expect("finite");
        let m2 = normalized_second_moment(&m, &v).expect("finite");
        let mean = normalized_expectation(&m, &v).expect("finite");
        let expanded = m2 - 2.0 * (z.conj() * mean).re + z.norm_sqr();
        let scale = 1.0 + m2 + z.norm_sqr();
        prop_assert!((direct - expanded).abs() <= 1e-12 * scale, "{direct} vs {expanded}");
    }
}
