//! Trajectory ensembles: the parallel Monte Carlo driver, streaming
//! statistics, density-matrix reconstruction, and exponential growth-rate
//! fits.
//!
//! ## Determinism contract
//!
//! Identical `(hamiltonian, initial state, scheme, params, n_traj, seed)`
//! inputs produce bit-identical [`EnsembleStatistics`] regardless of how many
//! worker threads execute the run. Two mechanisms guarantee this:
//!
//! 1. Every `(trajectory, pair member)` combination owns a private counter-mode
//!    RNG stream derived from the master seed by an arithmetic mix, so the
//!    noise a trajectory sees never depends on scheduling.
//! 2. Trajectories are grouped into fixed blocks of [`TRAJ_BLOCK`]. Each block
//!    accumulates its partial sums over trajectories in index order, and block
//!    partials are merged in block order after the parallel section. The
//!    floating-point summation tree is therefore a pure function of `n_traj`.
//!
//! ## Dead trajectories
//!
//! A trajectory whose joint norm underflows or turns non-finite is dropped
//! entirely — none of its samples, including the initial one, enter any
//! average — and counted in [`EnsembleStatistics::dead_count`]. Silent
//! inclusion would corrupt the averages and silent exclusion would hide the
//! bias, so the count is always reported. An ensemble with no survivors is an
//! explicit [`Error::EmptyEnsemble`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::{dot_slice, C64, DensityMatrix};
use crate::model::InteractionHamiltonian;
use crate::propagator::{DyadicPair, IntegrationParams, PairStepper, Prepared, ProductState};
use crate::stochastic::SchemeKind;
use crate::{Error, Result};

/// Trajectories per reduction block. Part of the determinism contract: the
/// partial-sum topology depends only on trajectory count, never on the number
/// of worker threads.
pub(crate) const TRAJ_BLOCK: usize = 256;

/// Minimum number of samples a growth-rate fit window must contain.
const MIN_FIT_SAMPLES: usize = 10;

// ---------------------------------------------------------------------------
// Per-member RNG streams
// ---------------------------------------------------------------------------

/// SplitMix64 step: advances `state` and returns one well-mixed 64-bit word.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the private noise stream for one pair member of one trajectory.
///
/// The (trajectory, member) coordinates are folded into a 64-bit state with
/// odd multipliers (so distinct coordinates cannot collide), then expanded
/// through SplitMix64 into a full 256-bit ChaCha seed. The stream is a pure
/// function of its three arguments.
pub(crate) fn member_stream(master_seed: u64, trajectory: u64, member: u64) -> ChaCha8Rng {
    let mut state = master_seed ^ 0x6A09_E667_F3BC_C909;
    state = state.wrapping_add(trajectory.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    state = state.wrapping_add(member.wrapping_mul(0xD1B5_4A32_D192_ED03));
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

// ---------------------------------------------------------------------------
// EnsembleStatistics
// ---------------------------------------------------------------------------

/// Per-time-step ensemble averages over the live trajectories.
///
/// All arrays share the length of [`EnsembleStatistics::times`], one entry per
/// integrator step including the initial condition. The occupation arrays
/// (`n_plus*`) are populated only when the system factor is two-dimensional;
/// for other system dimensions they are empty and consumers should read
/// [`EnsembleStatistics::rho_s`] directly.
#[derive(Debug, Clone)]
pub struct EnsembleStatistics {
    times: Vec<f64>,
    mean_norm: Vec<f64>,
    lambda_stat: Vec<f64>,
    lambda_stat_stderr: Vec<f64>,
    rho_s: Vec<DensityMatrix>,
    n_plus: Vec<f64>,
    n_plus_std: Vec<f64>,
    n_plus_stderr: Vec<f64>,
    trajectory_count: usize,
    dead_count: usize,
}

impl EnsembleStatistics {
    /// Output time grid `k * dt`, including `t = 0`.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Mean squared joint norm `<Psi|Psi>`, averaged over live trajectories
    /// and over both pair members (the two members are statistically
    /// identical, and pooling them halves the estimator variance).
    pub fn mean_norm(&self) -> &[f64] {
        &self.mean_norm
    }

    /// Statistical-error measure: mean of the norm product
    /// `<Psi_1|Psi_1><Psi_2|Psi_2>` minus the squared-purity baseline
    /// `Tr rho^2 = 1` of the pure initial condition. Nonnegative up to Monte
    /// Carlo noise, and grows with the sampling cost of the scheme.
    pub fn lambda_stat(&self) -> &[f64] {
        &self.lambda_stat
    }

    /// Standard error of the norm-product mean underlying
    /// [`EnsembleStatistics::lambda_stat`].
    pub fn lambda_stat_stderr(&self) -> &[f64] {
        &self.lambda_stat_stderr
    }

    /// Reconstructed system density matrix at each output time: the raw
    /// average of `<chi_2|chi_1> |phi_1><phi_2|` over live trajectories, with
    /// no Hermitization or renormalization, so the estimator quality stays
    /// visible.
    pub fn rho_s(&self) -> &[DensityMatrix] {
        &self.rho_s
    }

    /// Mean occupation of the first system basis state (`n_+` for the
    /// spin-star benchmark). Empty unless the system dimension is 2.
    pub fn n_plus(&self) -> &[f64] {
        &self.n_plus
    }

    /// Sample standard deviation of the per-trajectory occupation
    /// contributions. Empty unless the system dimension is 2.
    pub fn n_plus_std(&self) -> &[f64] {
        &self.n_plus_std
    }

    /// Standard error of [`EnsembleStatistics::n_plus`]
    /// (`std / sqrt(n_live)`). Empty unless the system dimension is 2.
    pub fn n_plus_stderr(&self) -> &[f64] {
        &self.n_plus_stderr
    }

    /// Number of trajectories launched.
    pub fn trajectory_count(&self) -> usize {
        self.trajectory_count
    }

    /// Number of trajectories that died (norm underflow or non-finite
    /// amplitudes) and were excluded from every average.
    pub fn dead_count(&self) -> usize {
        self.dead_count
    }

    /// Number of trajectories contributing to the averages.
    pub fn live_count(&self) -> usize {
        self.trajectory_count - self.dead_count
    }

    /// Builds a statistics object carrying only a norm curve, for exercising
    /// the fitting routines against synthetic inputs.
    #[cfg(test)]
    pub(crate) fn synthetic(times: Vec<f64>, mean_norm: Vec<f64>) -> Self {
        let len = times.len();
        Self {
            times,
            mean_norm,
            lambda_stat: vec![0.0; len],
            lambda_stat_stderr: vec![0.0; len],
            rho_s: Vec::new(),
            n_plus: Vec::new(),
            n_plus_std: Vec::new(),
            n_plus_stderr: Vec::new(),
            trajectory_count: 1,
            dead_count: 0,
        }
    }
}

// ---------------------------------------------------------------------------
// Block accumulators
// ---------------------------------------------------------------------------

/// Raw power sums for one fixed block of trajectories. Merging two
/// accumulators is exact bookkeeping, so the parallel reduction stays
/// deterministic as long as merge order is fixed.
struct BlockAccum {
    sys_dim: usize,
    samples: usize,
    /// `sum over live trajectories of (n_1 + n_2)/2` per step.
    sum_norm: Vec<f64>,
    /// `sum of n_1 * n_2` per step.
    sum_prod: Vec<f64>,
    /// `sum of (n_1 * n_2)^2` per step, for the stderr of the product mean.
    sum_prod_sq: Vec<f64>,
    /// `sum of Re(T_00)^2` per step, for the occupation spread; `T` is the
    /// per-trajectory dyadic contribution.
    sum_occ_sq: Vec<f64>,
    /// `sum of T` per step, flattened row-major per sample.
    sum_rho: Vec<C64>,
    live: usize,
    dead: usize,
}

impl BlockAccum {
    fn zeros(samples: usize, sys_dim: usize) -> Self {
        Self {
            sys_dim,
            samples,
            sum_norm: vec![0.0; samples],
            sum_prod: vec![0.0; samples],
            sum_prod_sq: vec![0.0; samples],
            sum_occ_sq: vec![0.0; samples],
            sum_rho: vec![C64::new(0.0, 0.0); samples * sys_dim * sys_dim],
            live: 0,
            dead: 0,
        }
    }

    /// Folds one completed (live) trajectory track into the block sums.
    fn absorb_track(&mut self, track: &TrajTrack) {
        let d2 = self.sys_dim * self.sys_dim;
        for k in 0..self.samples {
            self.sum_norm[k] += track.half_norm[k];
            let p = track.norm_prod[k];
            self.sum_prod[k] += p;
            self.sum_prod_sq[k] += p * p;
            self.sum_occ_sq[k] += track.rho[k * d2].re * track.rho[k * d2].re;
        }
        for (acc, contrib) in self.sum_rho.iter_mut().zip(&track.rho) {
            *acc += contrib;
        }
        self.live += 1;
    }

    fn merge(&mut self, other: &BlockAccum) {
        debug_assert_eq!(self.samples, other.samples);
        debug_assert_eq!(self.sys_dim, other.sys_dim);
        for k in 0..self.samples {
            self.sum_norm[k] += other.sum_norm[k];
            self.sum_prod[k] += other.sum_prod[k];
            self.sum_prod_sq[k] += other.sum_prod_sq[k];
            self.sum_occ_sq[k] += other.sum_occ_sq[k];
        }
        for (acc, z) in self.sum_rho.iter_mut().zip(&other.sum_rho) {
            *acc += z;
        }
        self.live += other.live;
        self.dead += other.dead;
    }
}

/// Per-trajectory sample buffer, committed to the block sums only if the
/// trajectory survives the full time grid.
struct TrajTrack {
    half_norm: Vec<f64>,
    norm_prod: Vec<f64>,
    rho: Vec<C64>,
}

impl TrajTrack {
    fn zeros(samples: usize, sys_dim: usize) -> Self {
        Self {
            half_norm: vec![0.0; samples],
            norm_prod: vec![0.0; samples],
            rho: vec![C64::new(0.0, 0.0); samples * sys_dim * sys_dim],
        }
    }

    /// Records the current stepper state as sample `k`.
    fn record(&mut self, k: usize, sys_dim: usize, stepper: &PairStepper<'_, '_>) {
        let (n1, n2) = stepper.joint_norms();
        self.half_norm[k] = 0.5 * (n1 + n2);
        self.norm_prod[k] = n1 * n2;
        let (phi1, chi1) = stepper.ket_vectors();
        let (phi2, chi2) = stepper.bra_vectors();
        // Separable partial trace of the dyad |Psi_1><Psi_2|:
        // T_ij = <chi_2|chi_1> * phi_1[i] * conj(phi_2[j]).
        let overlap = dot_slice(chi2, chi1);
        let base = k * sys_dim * sys_dim;
        for i in 0..sys_dim {
            let row = overlap * phi1[i];
            for j in 0..sys_dim {
                self.rho[base + i * sys_dim + j] = row * phi2[j].conj();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Ensemble driver
// ---------------------------------------------------------------------------

/// Runs `n_traj` independent dyadic pairs from the symmetric initial
/// condition `Psi_1 = Psi_2 = initial` and reduces per-step statistics.
///
/// Each trajectory's two members draw from private seeded streams (see
/// [`member_stream`]), so results are bit-identical across worker counts.
/// Dead trajectories are excluded and counted; if none survive, the run fails
/// with [`Error::EmptyEnsemble`].
pub fn run_ensemble(
    h: &InteractionHamiltonian,
    initial: &ProductState,
    scheme: SchemeKind,
    params: &IntegrationParams,
    n_traj: usize,
    master_seed: u64,
) -> Result<EnsembleStatistics> {
    if n_traj == 0 {
        return Err(Error::InvalidParameter("trajectory count must be at least 1".into()));
    }
    if initial.system().dim() != h.system_dim() || initial.environment().dim() != h.env_dim() {
        return Err(Error::DimensionMismatch {
            expected: h.total_dim(),
            actual: initial.system().dim() * initial.environment().dim(),
            context: "ensemble initial state vs Hamiltonian",
        });
    }
    let pair0 = DyadicPair::symmetric(initial.clone());
    let prep = Prepared::new(h);
    let samples = params.step_count() + 1;
    let sys_dim = h.system_dim();

    let block_count = n_traj.div_ceil(TRAJ_BLOCK);
    let partials: Vec<Result<BlockAccum>> = (0..block_count)
        .into_par_iter()
        .map(|b| {
            let lo = b * TRAJ_BLOCK;
            let hi = ((b + 1) * TRAJ_BLOCK).min(n_traj);
            run_block(&prep, &pair0, scheme, *params, master_seed, lo, hi)
        })
        .collect();

    let mut total = BlockAccum::zeros(samples, sys_dim);
    for partial in partials {
        total.merge(&partial?);
    }
    finalize(sys_dim, params, total)
}

/// Propagates trajectories `lo..hi` sequentially and returns the block sums.
fn run_block(
    prep: &Prepared<'_>,
    pair0: &DyadicPair,
    scheme: SchemeKind,
    params: IntegrationParams,
    master_seed: u64,
    lo: usize,
    hi: usize,
) -> Result<BlockAccum> {
    let sys_dim = prep.h.system_dim();
    let samples = params.step_count() + 1;
    let mut accum = BlockAccum::zeros(samples, sys_dim);
    let mut track = TrajTrack::zeros(samples, sys_dim);
    for traj in lo..hi {
        let mut ket_noise = member_stream(master_seed, traj as u64, 0);
        let mut bra_noise = member_stream(master_seed, traj as u64, 1);
        let mut stepper = PairStepper::new(prep, pair0, scheme, params)?;
        track.record(0, sys_dim, &stepper);
        let mut died = false;
        for k in 1..=params.step_count() {
            match stepper.step(&mut ket_noise, &mut bra_noise) {
                Ok(()) => track.record(k, sys_dim, &stepper),
                Err(Error::DeadTrajectory) => {
                    died = true;
                    break;
                }
                Err(other) => return Err(other),
            }
        }
        if died {
            accum.dead += 1;
        } else {
            accum.absorb_track(&track);
        }
    }
    Ok(accum)
}

/// Converts merged power sums into the published statistics.
fn finalize(
    sys_dim: usize,
    params: &IntegrationParams,
    total: BlockAccum,
) -> Result<EnsembleStatistics> {
    let live = total.live;
    if live == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let nf = live as f64;
    let samples = total.samples;
    let d2 = sys_dim * sys_dim;

    let mut mean_norm = Vec::with_capacity(samples);
    let mut lambda_stat = Vec::with_capacity(samples);
    let mut lambda_stat_stderr = Vec::with_capacity(samples);
    let mut rho_s = Vec::with_capacity(samples);
    for k in 0..samples {
        mean_norm.push(total.sum_norm[k] / nf);
        let prod_mean = total.sum_prod[k] / nf;
        lambda_stat.push(prod_mean - 1.0);
        lambda_stat_stderr.push(sample_stderr(total.sum_prod_sq[k], prod_mean, live));
        let entries: Vec<C64> =
            total.sum_rho[k * d2..(k + 1) * d2].iter().map(|z| z / nf).collect();
        rho_s.push(DensityMatrix::from_raw(sys_dim, entries));
    }

    let (n_plus, n_plus_std, n_plus_stderr) = if sys_dim == 2 {
        let mut mean = Vec::with_capacity(samples);
        let mut std = Vec::with_capacity(samples);
        let mut stderr = Vec::with_capacity(samples);
        for k in 0..samples {
            let m = rho_s[k].entry(0, 0).re;
            let se = sample_stderr(total.sum_occ_sq[k], m, live);
            mean.push(m);
            std.push(se * nf.sqrt());
            stderr.push(se);
        }
        (mean, std, stderr)
    } else {
        (Vec::new(), Vec::new(), Vec::new())
    };

    Ok(EnsembleStatistics {
        times: params.times(),
        mean_norm,
        lambda_stat,
        lambda_stat_stderr,
        rho_s,
        n_plus,
        n_plus_std,
        n_plus_stderr,
        trajectory_count: live + total.dead,
        dead_count: total.dead,
    })
}

/// Standard error of a sample mean from its power sums: `sum_sq` is the sum
/// of squared samples, `mean` the sample mean, `n` the sample count. Uses the
/// unbiased (n-1) variance, clamped at zero against rounding.
fn sample_stderr(sum_sq: f64, mean: f64, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (var / nf).sqrt()
}

// ---------------------------------------------------------------------------
// Reconstruction and observables
// ---------------------------------------------------------------------------

/// Reconstructs the system density matrix from a set of live pairs at equal
/// times: the average of `<chi_2|chi_1> |phi_1><phi_2|`, the partial trace of
/// the separable dyad. No Hermitization is applied.
pub fn reconstruct_system_density(pairs: &[DyadicPair]) -> Result<DensityMatrix> {
    let first = pairs.first().ok_or(Error::EmptyEnsemble)?;
    let sys_dim = first.ket().system().dim();
    let env_dim = first.ket().environment().dim();
    let mut sum = vec![C64::new(0.0, 0.0); sys_dim * sys_dim];
    for pair in pairs {
        if pair.ket().system().dim() != sys_dim || pair.ket().environment().dim() != env_dim {
            return Err(Error::DimensionMismatch {
                expected: sys_dim * env_dim,
                actual: pair.ket().system().dim() * pair.ket().environment().dim(),
                context: "mixed dimensions in pair set",
            });
        }
        let phi1 = pair.ket().system().amplitudes();
        let chi1 = pair.ket().environment().amplitudes();
        let phi2 = pair.bra().system().amplitudes();
        let chi2 = pair.bra().environment().amplitudes();
        let overlap = dot_slice(chi2, chi1);
        for i in 0..sys_dim {
            let row = overlap * phi1[i];
            for j in 0..sys_dim {
                sum[i * sys_dim + j] += row * phi2[j].conj();
            }
        }
    }
    let nf = pairs.len() as f64;
    for z in sum.iter_mut() {
        *z /= nf;
    }
    Ok(DensityMatrix::from_raw(sys_dim, sum))
}

/// Occupation of the first basis state of a two-level system: the real part
/// of the `(0,0)` entry. The imaginary part is sampling noise by
/// construction; callers wanting it as a diagnostic can read
/// [`DensityMatrix::entry`] directly.
pub fn occupation_probability(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho.dim(),
            context: "occupation probability needs a two-level system",
        });
    }
    Ok(rho.entry(0, 0).re)
}

// ---------------------------------------------------------------------------
// Growth-rate fit
// ---------------------------------------------------------------------------

/// Result of an exponential growth-rate fit `mean_norm ~ A exp(lambda_s t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    lambda_s: f64,
    window: (f64, f64),
    residual: f64,
}

impl FitResult {
    /// Fitted exponential rate (units of inverse time).
    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }

    /// The `(t_min, t_max)` window the fit used.
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    /// Root-mean-square deviation of `ln(mean_norm)` from the fitted
    /// exponential (dimensionless; scale-free across growth rates).
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Least-squares fit of `A exp(lambda_s t)` to the mean-norm curve over the
/// samples in `window = (t_min, t_max)` (inclusive, with a small edge
/// tolerance for float grids).
///
/// The fit is performed on the raw curve, not its logarithm: the squared
/// error `sum_i (n_i - A e^{lambda t_i})^2` is minimized with the amplitude
/// profiled out analytically, leaving a one-dimensional search over the
/// rate. Because the raw residuals weight the large-norm part of the window,
/// the estimate tracks the curve where exponential growth is established
/// rather than the early transient, whose slope is pinned at the
/// scheme-independent initial value for every scheme. A log-space ordinary
/// least squares is used only to seed the search.
pub fn fit_growth_rate(stats: &EnsembleStatistics, window: (f64, f64)) -> Result<FitResult> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "fit window must be finite with t_min < t_max, got [{lo}, {hi}]"
        )));
    }
    // Grid times come from k * dt, so the nominal window edges can land a few
    // ulps outside the grid values; a relative pad keeps the edge samples in.
    let pad = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
    let mut ts = Vec::new();
    let mut ns = Vec::new();
    for (&t, &m) in stats.times.iter().zip(&stats.mean_norm) {
        if t < lo - pad || t > hi + pad {
            continue;
        }
        if !(m > 0.0) {
            return Err(Error::NonPositiveNorm { value: m, t });
        }
        ts.push(t);
        ns.push(m);
    }
    if ts.len() < MIN_FIT_SAMPLES {
        return Err(Error::FitWindow { lo, hi, min_samples: MIN_FIT_SAMPLES });
    }

    // Log-space OLS slope: the seed for the one-dimensional search.
    let count = ts.len() as f64;
    let t_mean = ts.iter().sum::<f64>() / count;
    let y_mean = ns.iter().map(|m| m.ln()).sum::<f64>() / count;
    let mut s_tt = 0.0;
    let mut s_ty = 0.0;
    for (&t, &m) in ts.iter().zip(&ns) {
        let dt = t - t_mean;
        s_tt += dt * dt;
        s_ty += dt * (m.ln() - y_mean);
    }
    if s_tt <= 0.0 {
        return Err(Error::InvalidParameter(
            "fit window contains no spread in time".into(),
        ));
    }
    let seed_slope = s_ty / s_tt;

    // Work on the unit interval tau = (t - t0) / width so the exponentials
    // stay well conditioned for any window size, and search mu = lambda*width.
    let t0 = ts[0];
    let width = ts[ts.len() - 1] - t0;
    let taus: Vec<f64> = ts.iter().map(|&t| (t - t0) / width).collect();

    // Profiled amplitude: for fixed mu, the optimal A is the projection of
    // the data onto e^{mu tau}, so minimizing the squared error is the same
    // as maximizing gain(mu) = (sum n e)^2 / (sum e^2).
    let gain = |mu: f64| -> f64 {
        let mut ne = 0.0;
        let mut ee = 0.0;
        for (&tau, &m) in taus.iter().zip(&ns) {
            let e = (mu * tau).exp();
            ne += m * e;
            ee += e * e;
        }
        ne * ne / ee
    };

    // Bracket a maximum around the seed, then golden-section to convergence.
    const MU_LIMIT: f64 = 80.0;
    let clamp = |m: f64| m.clamp(-MU_LIMIT, MU_LIMIT);
    let mut mid = clamp(seed_slope * width);
    let mut step = 0.5;
    let (mut a, mut b) = (clamp(mid - step), clamp(mid + step));
    let mut g_mid = gain(mid);
    loop {
        let (g_a, g_b) = (gain(a), gain(b));
        if g_mid >= g_a && g_mid >= g_b {
            break;
        }
        step *= 2.0;
        if g_b > g_mid {
            mid = b;
            g_mid = g_b;
            b = clamp(mid + step);
            a = clamp(mid - step);
        } else {
            mid = a;
            g_mid = g_a;
            a = clamp(mid - step);
            b = clamp(mid + step);
        }
        if step > 4.0 * MU_LIMIT {
            break;
        }
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut x1, mut x2) = (b - INV_PHI * (b - a), a + INV_PHI * (b - a));
    let (mut g1, mut g2) = (gain(x1), gain(x2));
    while b - a > 1e-7 * (1.0 + mid.abs()) {
        if g1 < g2 {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + INV_PHI * (b - a);
            g2 = gain(x2);
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - INV_PHI * (b - a);
            g1 = gain(x1);
        }
    }
    let mut mu = 0.5 * (a + b);

    // Direct gain comparisons bottom out at sqrt(machine epsilon) because the
    // objective is quadratically flat at its maximum; its derivative crosses
    // zero linearly there, so bisecting the derivative recovers full
    // precision. slope_residual(mu) is proportional to minus that derivative.
    let slope_residual = |mu: f64| -> f64 {
        let mut ne = 0.0;
        let mut ee = 0.0;
        for (&tau, &m) in taus.iter().zip(&ns) {
            let e = (mu * tau).exp();
            ne += m * e;
            ee += e * e;
        }
        let amp = ne / ee;
        taus.iter()
            .zip(&ns)
            .map(|(&tau, &m)| {
                let e = (mu * tau).exp();
                (m - amp * e) * tau * e
            })
            .sum()
    };
    let half = 1e-4 * (1.0 + mu.abs());
    let (mut ra, mut rb) = (mu - half, mu + half);
    let (da, db) = (slope_residual(ra), slope_residual(rb));
    if da > 0.0 && db < 0.0 {
        for _ in 0..200 {
            let rm = 0.5 * (ra + rb);
            if rm <= ra || rm >= rb {
                break;
            }
            if slope_residual(rm) > 0.0 {
                ra = rm;
            } else {
                rb = rm;
            }
        }
        mu = 0.5 * (ra + rb);
    }
    let lambda_s = mu / width;

    let mut ne = 0.0;
    let mut ee = 0.0;
    for (&tau, &m) in taus.iter().zip(&ns) {
        let e = (mu * tau).exp();
        ne += m * e;
        ee += e * e;
    }
    let amplitude = ne / ee;
    let ss_res: f64 = taus
        .iter()
        .zip(&ns)
        .map(|(&tau, &m)| {
            let r = m.ln() - (amplitude.ln() + mu * tau);
            r * r
        })
        .sum();
    Ok(FitResult {
        lambda_s,
        window: (lo, hi),
        residual: (ss_res / count).sqrt(),
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
