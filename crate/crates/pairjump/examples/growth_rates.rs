//! Prints the sampling-cost growth rate `lambda_s` of each scheme on the
//! single-bath-spin benchmark: the mean squared norm of the stochastic pairs
//! grows like `exp(lambda_s t)`, and the scheme ranking
//! SSE > SMF > OSSE > OSMF is the headline result this library reproduces.
//!
//! Run with `cargo run --release --example growth_rates [n_traj] [seed]`.

use pairjump::ensemble::{fit_growth_rate, run_ensemble};
use pairjump::model::{build_spin_star, initial_state, SpinStarModel};
use pairjump::propagator::IntegrationParams;
use pairjump::stochastic::SchemeKind;

fn main() {
    let mut args = std::env::args().skip(1);
    let n_traj: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let coupling = 0.5;
    let model = SpinStarModel::new(1, coupling).unwrap();
    let h = build_spin_star(&model).unwrap();
    let initial = initial_state(&model);
    // Fit window C*t in [0, 1.5], i.e. t in [0, 3] at C = 0.5.
    let params = IntegrationParams::new(0.01, 300).unwrap();

    println!("scheme  n_traj  dead  lambda_s  residual  seconds");
    for scheme in SchemeKind::ALL {
        let start = std::time::Instant::now();
        let stats = run_ensemble(&h, &initial, scheme, &params, n_traj, seed).unwrap();
        let fit = fit_growth_rate(&stats, (0.0, 1.5 / coupling)).unwrap();
        println!(
            "{:<6}  {:>6}  {:>4}  {:>8.4}  {:>8.2e}  {:>7.2}",
            scheme.to_string(),
            n_traj,
            stats.dead_count(),
            fit.lambda_s(),
            fit.residual(),
            start.elapsed().as_secs_f64()
        );
    }
}
