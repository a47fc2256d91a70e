//! Command-line front end: single runs, parameter sweeps, and
//! exact-vs-stochastic comparisons over the spin-star benchmark, with CSV
//! output plus a JSON manifest describing each run.
//!
//! ## Output contract
//!
//! Every CSV starts with `# manifest: <path>` pointing at the JSON manifest,
//! followed by a header row and data rows. Numeric values are printed with
//! 12 significant digits, comma separated, `\n` line endings. The CSV bytes
//! are a pure function of the configuration — worker-thread count and wall
//! time never leak into them — so identical invocations produce identical
//! files.
//!
//! ## Exit codes
//!
//! `0` success, `2` usage or validation error (nothing written), `1` runtime
//! failure (I/O, ensemble death, fit failure).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ensemble::{fit_growth_rate, run_ensemble, EnsembleStatistics};
use crate::model::{build_spin_star, initial_state, SpinStarModel};
use crate::oracle::analytic_occupation;
use crate::propagator::IntegrationParams;
use crate::stochastic::SchemeKind;

/// Manifest schema version, bumped on any breaking change to the JSON keys.
const SCHEMA_VERSION: u32 = 1;

/// Upper bound on integration steps per run, to catch absurd `tmax/dt`
/// combinations before they exhaust memory.
const MAX_STEPS: usize = 10_000_000;

/// Fit windows span `coupling * t` in `[0, 1.5]`, clipped to the simulated
/// horizon: the growth is cleanly exponential there for every scheme.
const FIT_WINDOW_CT: f64 = 1.5;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(
    name = "pairjump",
    version,
    about = "Stochastic pair-of-state-vector simulator for system-environment dynamics"
)]
pub struct Cli {
    /// Worker thread cap (default: PAIRJUMP_THREADS, else all cores).
    /// Results are identical for every value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one stochastic ensemble and write per-time statistics.
    Run(RunArgs),
    /// Fit growth rates across a parameter axis and write a summary table.
    Sweep(SweepArgs),
    /// Compare ensemble occupations against the closed-form reference.
    Compare(RunArgs),
}

/// Integration scheme selector (CLI face of [`SchemeKind`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Plain stochastic pair evolution with unit noise.
    Sse,
    /// Stochastic mean field: deterministic drift plus centered noise.
    Smf,
    /// Adaptive noise scaling and phases on the plain scheme.
    Osse,
    /// Adaptive noise on top of the mean-field split.
    Osmf,
}

impl MethodArg {
    fn kind(self) -> SchemeKind {
        match self {
            MethodArg::Sse => SchemeKind::Sse,
            MethodArg::Smf => SchemeKind::Smf,
            MethodArg::Osse => SchemeKind::Osse,
            MethodArg::Osmf => SchemeKind::Osmf,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MethodArg::Sse => "sse",
            MethodArg::Smf => "smf",
            MethodArg::Osse => "osse",
            MethodArg::Osmf => "osmf",
        }
    }
}

/// Sweep axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    /// Vary the coupling strength at fixed bath size.
    Coupling,
    /// Vary the bath size at fixed coupling.
    Nbath,
}

impl AxisArg {
    fn name(self) -> &'static str {
        match self {
            AxisArg::Coupling => "coupling",
            AxisArg::Nbath => "nbath",
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Integration scheme.
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Number of bath spins.
    #[arg(long)]
    nbath: usize,
    /// Coupling strength C (zero gives trivial free dynamics).
    #[arg(long)]
    coupling: f64,
    /// Number of stochastic trajectories.
    #[arg(long)]
    ntraj: usize,
    /// Integrator time step.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Final time; the grid is k*dt for k = 0..round(tmax/dt).
    #[arg(long, default_value_t = 3.0)]
    tmax: f64,
    /// Master RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; the manifest lands next to it.
    #[arg(long)]
    out: PathBuf,
    /// Emit every stride-th time sample.
    #[arg(long, default_value_t = 10)]
    stride: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Parameter axis to sweep.
    #[arg(long, value_enum)]
    axis: AxisArg,
    /// Comma-separated axis values (at least two).
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<String>,
    /// Scheme to include (repeat the flag for several).
    #[arg(long = "method", value_enum, required = true)]
    methods: Vec<MethodArg>,
    /// Bath size when sweeping the coupling.
    #[arg(long, default_value_t = 1)]
    nbath: usize,
    /// Coupling when sweeping the bath size.
    #[arg(long, default_value_t = 0.5)]
    coupling: f64,
    /// Number of stochastic trajectories per sweep point.
    #[arg(long)]
    ntraj: usize,
    /// Integrator time step.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Final time; the grid is k*dt for k = 0..round(tmax/dt).
    #[arg(long, default_value_t = 3.0)]
    tmax: f64,
    /// Master RNG seed (shared by every sweep point).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; the manifest lands next to it.
    #[arg(long)]
    out: PathBuf,
    /// Unused for sweeps; accepted for interface symmetry.
    #[arg(long, default_value_t = 10)]
    stride: usize,
}

// ---------------------------------------------------------------------------
// Errors and entry point
// ---------------------------------------------------------------------------

/// CLI failure, tagged with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration; exit code 2, nothing written.
    Usage(String),
    /// Failure while doing the work (simulation, fitting, I/O); exit code 1.
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Parses `std::env::args`, executes, and returns the process exit code.
pub fn run_cli() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print to stdout and succeed; real
            // parse errors go to stderr with the usage exit code.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let threads = resolve_threads(cli.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| runtime(format!("failed to build worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Run(args) => run_command(&args),
        Command::Sweep(args) => sweep_command(&args),
        Command::Compare(args) => compare_command(&args),
    })
}

/// `--threads`, else `PAIRJUMP_THREADS`, else 0 (library default: all cores).
fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    let value = match flag {
        Some(n) => n,
        None => match std::env::var("PAIRJUMP_THREADS") {
            Ok(raw) => raw.parse::<usize>().map_err(|_| {
                usage(format!("PAIRJUMP_THREADS must be a positive integer, got {raw:?}"))
            })?,
            Err(std::env::VarError::NotPresent) => return Ok(0),
            Err(e) => return Err(usage(format!("PAIRJUMP_THREADS is unreadable: {e}"))),
        },
    };
    if value == 0 {
        return Err(usage("worker thread cap must be at least 1"));
    }
    Ok(value)
}

// ---------------------------------------------------------------------------
// Shared run plumbing
// ---------------------------------------------------------------------------

/// Everything needed to launch one ensemble, validated.
struct PreparedRun {
    model: SpinStarModel,
    params: IntegrationParams,
}

fn prepare_run(
    nbath: usize,
    coupling: f64,
    ntraj: usize,
    dt: f64,
    tmax: f64,
    stride: usize,
) -> Result<PreparedRun, CliError> {
    if ntraj == 0 {
        return Err(usage("--ntraj must be at least 1"));
    }
    if stride == 0 {
        return Err(usage("--stride must be at least 1"));
    }
    let model = SpinStarModel::new(nbath, coupling).map_err(usage)?;
    let steps = steps_for(dt, tmax)?;
    let params = IntegrationParams::new(dt, steps).map_err(usage)?;
    Ok(PreparedRun { model, params })
}

/// Rounds `tmax/dt` to the nearest step count and validates the grid.
fn steps_for(dt: f64, tmax: f64) -> Result<usize, CliError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(usage(format!("--dt must be positive and finite, got {dt}")));
    }
    if !(tmax.is_finite() && tmax > 0.0) {
        return Err(usage(format!("--tmax must be positive and finite, got {tmax}")));
    }
    let steps = (tmax / dt).round();
    if steps < 1.0 {
        return Err(usage(format!("--tmax {tmax} is below one step of --dt {dt}")));
    }
    if steps > MAX_STEPS as f64 {
        return Err(usage(format!(
            "--tmax/--dt asks for {steps:.0} steps; the cap is {MAX_STEPS}"
        )));
    }
    Ok(steps as usize)
}

fn execute(prep: &PreparedRun, method: MethodArg, ntraj: usize, seed: u64) -> Result<EnsembleStatistics, CliError> {
    let h = build_spin_star(&prep.model).map_err(usage)?;
    let psi0 = initial_state(&prep.model);
    run_ensemble(&h, &psi0, method.kind(), &prep.params, ntraj, seed).map_err(runtime)
}

/// Fit window for a run: `coupling * t` in `[0, 1.5]` clipped to the horizon.
/// Zero coupling leaves the whole horizon.
fn fit_window(coupling: f64, tmax: f64) -> (f64, f64) {
    let upper = if coupling > 0.0 { (FIT_WINDOW_CT / coupling).min(tmax) } else { tmax };
    (0.0, upper)
}

/// Numeric CSV cell: 12 significant digits, scientific notation.
fn fmt_val(x: f64) -> String {
    format!("{x:.11e}")
}

/// The value a reader recovers from the printed cell. Summary fits consume
/// these so the CSV parses back to exactly the inputs of every derived row.
fn round_to_output(x: f64) -> f64 {
    fmt_val(x).parse().expect("formatted float reparses")
}

/// Manifest path: the output path with its extension replaced by
/// `manifest.json` (`run.csv` -> `run.manifest.json`).
fn manifest_path_for(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
struct Manifest<C: Serialize> {
    schema_version: u32,
    config: C,
    dead_trajectories: usize,
    lambda_s: Option<f64>,
    fit_window: Option<(f64, f64)>,
    wall_seconds: f64,
}

fn write_manifest<C: Serialize>(path: &Path, manifest: &Manifest<C>) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(manifest)
        .map_err(|e| runtime(format!("manifest serialization failed: {e}")))?;
    body.push('\n');
    write_text(path, &body)
}

#[derive(Debug, Serialize)]
struct RunConfigEcho {
    command: &'static str,
    method: &'static str,
    n_bath: usize,
    coupling: f64,
    n_traj: usize,
    dt: f64,
    t_max: f64,
    seed: u64,
    out_path: String,
    stride: usize,
}

impl RunConfigEcho {
    fn new(command: &'static str, args: &RunArgs) -> Self {
        Self {
            command,
            method: args.method.name(),
            n_bath: args.nbath,
            coupling: args.coupling,
            n_traj: args.ntraj,
            dt: args.dt,
            t_max: args.tmax,
            seed: args.seed,
            out_path: args.out.display().to_string(),
            stride: args.stride,
        }
    }
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

fn run_command(args: &RunArgs) -> Result<(), CliError> {
    let prep = prepare_run(args.nbath, args.coupling, args.ntraj, args.dt, args.tmax, args.stride)?;
    let start = Instant::now();
    let stats = execute(&prep, args.method, args.ntraj, args.seed)?;

    let fit = match fit_growth_rate(&stats, fit_window(args.coupling, args.tmax)) {
        Ok(fit) => Some(fit),
        Err(e) => {
            eprintln!("warning: growth-rate fit skipped: {e}");
            None
        }
    };

    let manifest_path = manifest_path_for(&args.out);
    let mut csv = String::new();
    let _ = writeln!(csv, "# manifest: {}", manifest_path.display());
    let _ = writeln!(csv, "t,mean_norm,lambda_stat,n_plus,n_plus_std,n_plus_stderr,n_plus_exact");
    for k in (0..stats.times().len()).step_by(args.stride) {
        let t = stats.times()[k];
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            fmt_val(t),
            fmt_val(stats.mean_norm()[k]),
            fmt_val(stats.lambda_stat()[k]),
            fmt_val(stats.n_plus()[k]),
            fmt_val(stats.n_plus_std()[k]),
            fmt_val(stats.n_plus_stderr()[k]),
            fmt_val(analytic_occupation(args.coupling, t)),
        );
    }
    write_text(&args.out, &csv)?;

    write_manifest(
        &manifest_path,
        &Manifest {
            schema_version: SCHEMA_VERSION,
            config: RunConfigEcho::new("run", args),
            dead_trajectories: stats.dead_count(),
            lambda_s: fit.map(|f| f.lambda_s()),
            fit_window: fit.map(|f| f.window()),
            wall_seconds: start.elapsed().as_secs_f64(),
        },
    )
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct SweepConfigEcho {
    command: &'static str,
    axis: &'static str,
    couplings: Option<Vec<f64>>,
    bath_sizes: Option<Vec<usize>>,
    methods: Vec<&'static str>,
    n_bath: usize,
    coupling: f64,
    n_traj: usize,
    dt: f64,
    t_max: f64,
    seed: u64,
    out_path: String,
}

/// Through-origin least squares `y = k x`: the coefficient and the relative
/// linearity residual `rms(y - k x) / rms(k x)`.
fn origin_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let k = sxy / sxx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - k * x).powi(2)).sum();
    let ss_fit: f64 = xs.iter().map(|x| (k * x).powi(2)).sum();
    (k, (ss_res / ss_fit).sqrt())
}

fn sweep_command(args: &SweepArgs) -> Result<(), CliError> {
    if args.values.len() < 2 {
        return Err(usage("--values needs at least two axis values"));
    }
    if args.methods.is_empty() {
        return Err(usage("at least one --method is required"));
    }
    // Parse axis values up front so nothing runs on a bad list.
    let mut points: Vec<(usize, f64, f64)> = Vec::new(); // (nbath, coupling, x)
    let mut couplings_echo = None;
    let mut baths_echo = None;
    match args.axis {
        AxisArg::Coupling => {
            let mut cs = Vec::new();
            for raw in &args.values {
                let c: f64 = raw
                    .parse()
                    .map_err(|_| usage(format!("bad coupling value {raw:?}")))?;
                if !(c.is_finite() && c > 0.0) {
                    return Err(usage(format!("coupling values must be positive, got {c}")));
                }
                points.push((args.nbath, c, c));
                cs.push(c);
            }
            couplings_echo = Some(cs);
        }
        AxisArg::Nbath => {
            let mut ns = Vec::new();
            for raw in &args.values {
                let n: usize = raw
                    .parse()
                    .map_err(|_| usage(format!("bad bath size {raw:?}")))?;
                if n == 0 {
                    return Err(usage("bath sizes must be at least 1"));
                }
                // The sqrt(N) axis is the natural abscissa for the bath sweep.
                points.push((n, args.coupling, (n as f64).sqrt()));
                ns.push(n);
            }
            baths_echo = Some(ns);
        }
    }

    let start = Instant::now();
    let mut dead_total = 0usize;
    let mut csv = String::new();
    let manifest_path = manifest_path_for(&args.out);
    let _ = writeln!(csv, "# manifest: {}", manifest_path.display());
    let _ = writeln!(csv, "kind,axis,value,method,lambda_s,residual");
    for &method in &args.methods {
        let mut xs = Vec::new();
        let mut lambdas = Vec::new();
        for &(nbath, coupling, x) in &points {
            let prep = prepare_run(nbath, coupling, args.ntraj, args.dt, args.tmax, 1)?;
            let stats = execute(&prep, method, args.ntraj, args.seed)?;
            dead_total += stats.dead_count();
            let fit = fit_growth_rate(&stats, fit_window(coupling, args.tmax)).map_err(runtime)?;
            // Summary fits consume the printed-precision values, so the file
            // re-derives exactly.
            let lambda = round_to_output(fit.lambda_s());
            let value_cell = match args.axis {
                AxisArg::Coupling => fmt_val(coupling),
                AxisArg::Nbath => nbath.to_string(),
            };
            let _ = writeln!(
                csv,
                "data,{},{},{},{},{}",
                args.axis.name(),
                value_cell,
                method.name(),
                fmt_val(lambda),
                fmt_val(fit.residual()),
            );
            xs.push(x);
            lambdas.push(lambda);
        }
        let (k, rel) = origin_fit(&xs, &lambdas);
        let _ = writeln!(
            csv,
            "fit,{},,{},{},{}",
            args.axis.name(),
            method.name(),
            fmt_val(k),
            fmt_val(rel),
        );
    }
    write_text(&args.out, &csv)?;

    write_manifest(
        &manifest_path,
        &Manifest {
            schema_version: SCHEMA_VERSION,
            config: SweepConfigEcho {
                command: "sweep",
                axis: args.axis.name(),
                couplings: couplings_echo,
                bath_sizes: baths_echo,
                methods: args.methods.iter().map(|m| m.name()).collect(),
                n_bath: args.nbath,
                coupling: args.coupling,
                n_traj: args.ntraj,
                dt: args.dt,
                t_max: args.tmax,
                seed: args.seed,
                out_path: args.out.display().to_string(),
            },
            dead_trajectories: dead_total,
            lambda_s: None,
            fit_window: None,
            wall_seconds: start.elapsed().as_secs_f64(),
        },
    )
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

fn compare_command(args: &RunArgs) -> Result<(), CliError> {
    let prep = prepare_run(args.nbath, args.coupling, args.ntraj, args.dt, args.tmax, args.stride)?;
    let start = Instant::now();
    let stats = execute(&prep, args.method, args.ntraj, args.seed)?;

    let manifest_path = manifest_path_for(&args.out);
    let mut csv = String::new();
    let _ = writeln!(csv, "# manifest: {}", manifest_path.display());
    let _ = writeln!(csv, "t,n_plus_mc,n_plus_stderr,n_plus_exact,abs_error,error_in_stderr_units");
    for k in (0..stats.times().len()).step_by(args.stride) {
        let t = stats.times()[k];
        let mc = stats.n_plus()[k];
        let stderr = stats.n_plus_stderr()[k];
        let exact = analytic_occupation(args.coupling, t);
        let abs_error = (mc - exact).abs();
        // 0/0 means "no error, no spread" (e.g. the t=0 sample): report 0.
        let in_units = if abs_error == 0.0 { 0.0 } else { abs_error / stderr };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            fmt_val(t),
            fmt_val(mc),
            fmt_val(stderr),
            fmt_val(exact),
            fmt_val(abs_error),
            fmt_val(in_units),
        );
    }
    write_text(&args.out, &csv)?;

    write_manifest(
        &manifest_path,
        &Manifest {
            schema_version: SCHEMA_VERSION,
            config: RunConfigEcho::new("compare", args),
            dead_trajectories: stats.dead_count(),
            lambda_s: None,
            fit_window: None,
            wall_seconds: start.elapsed().as_secs_f64(),
        },
    )
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_count_rounds_to_the_grid() {
        assert_eq!(steps_for(0.01, 3.0).unwrap(), 300);
        assert_eq!(steps_for(0.01, 2.999_999_999).unwrap(), 300);
        assert!(steps_for(0.1, 0.04).is_err()); // rounds to zero steps
        assert!(steps_for(0.0, 1.0).is_err());
        assert!(steps_for(-0.01, 1.0).is_err());
        assert!(steps_for(0.01, -1.0).is_err());
        assert!(steps_for(1e-9, 1e5).is_err()); // beyond the step cap
    }

    #[test]
    fn formatted_cells_carry_twelve_significant_digits() {
        assert_eq!(fmt_val(1.0), "1.00000000000e0");
        assert_eq!(fmt_val(0.25), "2.50000000000e-1");
        let x = std::f64::consts::PI;
        let reparsed: f64 = fmt_val(x).parse().unwrap();
        assert!((reparsed - x).abs() < 1e-11);
        assert_eq!(round_to_output(reparsed), reparsed);
    }

    #[test]
    fn manifest_path_swaps_the_extension() {
        assert_eq!(
            manifest_path_for(Path::new("out/run.csv")),
            PathBuf::from("out/run.manifest.json")
        );
        assert_eq!(manifest_path_for(Path::new("bare")), PathBuf::from("bare.manifest.json"));
    }

    #[test]
    fn origin_fit_recovers_exact_proportionality() {
        let xs = [0.25, 0.5, 1.0, 2.0];
        let ys: Vec<f64> = xs.iter().map(|x| 5.5 * x).collect();
        let (k, rel) = origin_fit(&xs, &ys);
        assert!((k - 5.5).abs() < 1e-12);
        assert!(rel < 1e-12);
    }

    #[test]
    fn fit_window_clips_to_horizon_and_handles_zero_coupling() {
        assert_eq!(fit_window(0.5, 10.0), (0.0, 3.0));
        assert_eq!(fit_window(0.5, 2.0), (0.0, 2.0));
        assert_eq!(fit_window(0.0, 7.0), (0.0, 7.0));
    }

    #[test]
    fn thread_resolution_rejects_zero() {
        assert!(matches!(resolve_threads(Some(0)), Err(CliError::Usage(_))));
        assert!(matches!(resolve_threads(Some(3)), Ok(3)));
    }

    #[test]
    fn validation_rejects_empty_ensembles_and_bad_strides() {
        assert!(matches!(
            prepare_run(1, 0.5, 0, 0.01, 3.0, 10),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            prepare_run(1, 0.5, 10, 0.01, 3.0, 0),
            Err(CliError::Usage(_))
        ));
        assert!(prepare_run(1, 0.5, 10, 0.01, 3.0, 10).is_ok());
    }
}
