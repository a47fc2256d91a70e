//! End-to-end tests of the command-line binary: output formats, manifest
//! contents, determinism, exit codes, and the CSV round-trip contract.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pairjump"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary launches");
    assert!(
        out.status.success(),
        "command {:?} failed: {}\n{}",
        args,
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Data rows of a CSV (everything past the manifest pointer and the header),
/// split into cells.
fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(2)
        .map(|line| line.split(',').map(str::to_owned).collect())
        .collect()
}

fn parse_cell(rows: &[Vec<String>], row: usize, col: usize) -> f64 {
    rows[row][col].parse().expect("numeric cell")
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

#[test]
fn run_writes_csv_and_manifest_with_expected_shape() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_path = dir.path().join("run.csv");
    run_ok(&[
        "run",
        "--method",
        "sse",
        "--nbath",
        "1",
        "--coupling",
        "0.5",
        "--ntraj",
        "500",
        "--seed",
        "42",
        "--out",
        out_path.to_str().unwrap(),
    ]);

    let csv = read(&out_path);
    let mut lines = csv.lines();
    let manifest_line = lines.next().expect("manifest pointer");
    let manifest_path = dir.path().join("run.manifest.json");
    assert_eq!(manifest_line, format!("# manifest: {}", manifest_path.display()));
    assert_eq!(
        lines.next().expect("header"),
        "t,mean_norm,lambda_stat,n_plus,n_plus_std,n_plus_stderr,n_plus_exact"
    );
    // Default grid: tmax 3.0, dt 0.01, stride 10 -> samples at steps 0..=300.
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 31);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 7, "row {i} has wrong arity");
        for cell in row {
            let v: f64 = cell.parse().expect("every cell is numeric");
            assert!(v.is_finite());
        }
    }
    // The exact-reference column is the closed-form occupation.
    for row in &rows {
        let t: f64 = row[0].parse().unwrap();
        let exact: f64 = row[6].parse().unwrap();
        assert!((exact - (2.0 * 0.5 * t).cos().powi(2)).abs() < 1e-10);
    }
    // First sample is the initial condition exactly.
    assert_eq!(parse_cell(&rows, 0, 1), 1.0);
    assert_eq!(parse_cell(&rows, 0, 3), 1.0);

    let manifest: serde_json::Value = serde_json::from_str(&read(&manifest_path)).expect("json");
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["config"]["method"], "sse");
    assert_eq!(manifest["config"]["n_traj"], 500);
    assert_eq!(manifest["config"]["seed"], 42);
    assert_eq!(manifest["dead_trajectories"], 0);
    assert!(manifest["lambda_s"].is_f64(), "lambda_s present: {manifest}");
    assert_eq!(manifest["fit_window"][0], 0.0);
    assert_eq!(manifest["fit_window"][1], 3.0);
    assert!(manifest["wall_seconds"].as_f64().expect("wall time") > 0.0);
}

#[test]
fn identical_run_commands_are_byte_identical() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_path = dir.path().join("repeat.csv");
    let args = [
        "run", "--method", "osse", "--nbath", "1", "--coupling", "0.5", "--ntraj", "300",
        "--tmax", "1.0", "--seed", "7", "--out",
    ];
    let mut full: Vec<&str> = args.to_vec();
    let path_str = out_path.to_str().unwrap();
    full.push(path_str);
    run_ok(&full);
    let first = read(&out_path);
    run_ok(&full);
    let second = read(&out_path);
    assert_eq!(first, second, "same command produced different CSV bytes");
}

#[test]
fn thread_cap_and_env_fallback_leave_output_unchanged() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_path = dir.path().join("threads.csv");
    let path_str = out_path.to_str().unwrap().to_owned();
    let mut base = vec![
        "run", "--method", "osmf", "--nbath", "2", "--coupling", "0.5", "--ntraj", "300",
        "--tmax", "1.0", "--seed", "11", "--out",
    ];
    base.push(&path_str);

    let mut one = base.clone();
    one.extend(["--threads", "1"]);
    run_ok(&one);
    let csv_one = read(&out_path);

    let mut four = base.clone();
    four.extend(["--threads", "4"]);
    run_ok(&four);
    let csv_four = read(&out_path);
    assert_eq!(csv_one, csv_four, "worker count changed the CSV bytes");

    // Env-var fallback takes the same path as the flag.
    let env_run = base.clone();
    let out = bin()
        .args(&env_run)
        .env("PAIRJUMP_THREADS", "2")
        .output()
        .expect("binary launches");
    assert!(out.status.success());
    assert_eq!(csv_one, read(&out_path), "env-capped run changed the CSV bytes");

    let bad = bin()
        .args(&env_run)
        .env("PAIRJUMP_THREADS", "zero")
        .output()
        .expect("binary launches");
    assert_eq!(bad.status.code(), Some(2), "junk PAIRJUMP_THREADS should be a usage error");
}

#[test]
fn zero_ntraj_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_path = dir.path().join("never.csv");
    let out = bin()
        .args([
            "run", "--method", "sse", "--nbath", "1", "--coupling", "0.5", "--ntraj", "0",
            "--out", out_path.to_str().unwrap(),
        ])
        .output()
        .expect("binary launches");
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty(), "expected an error message");
    assert!(!out_path.exists(), "validation failure must not create the file");
    assert!(!dir.path().join("never.manifest.json").exists());
}

#[test]
fn unknown_method_is_a_usage_error() {
    let out = bin()
        .args([
            "run", "--method", "magic", "--nbath", "1", "--coupling", "0.5", "--ntraj", "10",
            "--out", "unused.csv",
        ])
        .output()
        .expect("binary launches");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_path_is_a_runtime_error() {
    let out = bin()
        .args([
            "run", "--method", "sse", "--nbath", "1", "--coupling", "0.5", "--ntraj", "10",
            "--tmax", "0.1", "--out", "/nonexistent-dir/run.csv",
        ])
        .output()
        .expect("binary launches");
    assert_eq!(out.status.code(), Some(1));
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

#[test]
fn compare_zero_coupling_single_trajectory_has_identically_zero_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_path = dir.path().join("null.csv");
    run_ok(&[
        "compare", "--method", "osmf", "--nbath", "1", "--coupling", "0.0", "--ntraj", "1",
        "--tmax", "1.0", "--out", out_path.to_str().unwrap(),
    ]);
    let csv = read(&out_path);
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("t,n_plus_mc,n_plus_stderr,n_plus_exact,abs_error,error_in_stderr_units"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 11);
    for (i, _) in rows.iter().enumerate() {
        assert_eq!(parse_cell(&rows, i, 1), 1.0, "free dynamics leave n_plus at 1");
        assert_eq!(parse_cell(&rows, i, 4), 0.0, "abs_error must vanish identically");
        assert_eq!(parse_cell(&rows, i, 5), 0.0, "stderr-units error must vanish");
    }
}

#[test]
fn compare_shows_larger_spread_for_the_plain_scheme() {
    let dir = tempfile::tempdir().expect("tempdir");
    let sse_path = dir.path().join("sse.csv");
    let osmf_path = dir.path().join("osmf.csv");
    for (method, path) in [("sse", &sse_path), ("osmf", &osmf_path)] {
        run_ok(&[
            "compare", "--method", method, "--nbath", "1", "--coupling", "0.5", "--ntraj",
            "500", "--seed", "5", "--out", path.to_str().unwrap(),
        ]);
    }
    let sse_rows = data_rows(&read(&sse_path));
    let osmf_rows = data_rows(&read(&osmf_path));
    // Compare total statistical error over the non-initial samples.
    let total = |rows: &[Vec<String>]| -> f64 {
        rows.iter().skip(1).map(|r| r[2].parse::<f64>().unwrap()).sum()
    };
    let (sse_total, osmf_total) = (total(&sse_rows), total(&osmf_rows));
    assert!(
        sse_total > 1.5 * osmf_total,
        "expected visibly larger plain-scheme stderr: sse {sse_total} vs osmf {osmf_total}"
    );
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[test]
fn sweep_emits_data_and_fit_rows_that_re_derive_exactly() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_path = dir.path().join("sweep.csv");
    run_ok(&[
        "sweep", "--axis", "coupling", "--values", "0.5,1.0", "--method", "sse", "--nbath",
        "1", "--ntraj", "300", "--tmax", "1.5", "--seed", "3", "--out",
        out_path.to_str().unwrap(),
    ]);
    let csv = read(&out_path);
    assert_eq!(
        csv.lines().nth(1).unwrap(),
        "kind,axis,value,method,lambda_s,residual"
    );
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 3, "two data rows plus one fit row");
    assert_eq!(rows[0][0], "data");
    assert_eq!(rows[1][0], "data");
    assert_eq!(rows[2][0], "fit");
    assert_eq!(rows[2][2], "", "fit rows carry no axis value");

    // Round trip: the printed fit coefficient derives exactly from the
    // printed per-point rates.
    let xs: Vec<f64> = (0..2).map(|i| parse_cell(&rows, i, 2)).collect();
    let ys: Vec<f64> = (0..2).map(|i| parse_cell(&rows, i, 4)).collect();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let k = sxy / sxx;
    assert_eq!(format!("{k:.11e}"), rows[2][4], "fit coefficient fails to re-derive");

    let manifest: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("sweep.manifest.json"))).expect("json");
    assert_eq!(manifest["config"]["axis"], "coupling");
    assert_eq!(manifest["config"]["methods"][0], "sse");
    assert!(manifest["lambda_s"].is_null());
}

#[test]
fn sweep_rejects_a_single_axis_value() {
    let out = bin()
        .args([
            "sweep", "--axis", "coupling", "--values", "0.5", "--method", "sse", "--ntraj",
            "10", "--out", "unused.csv",
        ])
        .output()
        .expect("binary launches");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_bath_axis_uses_integer_values() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out_path = dir.path().join("bath.csv");
    run_ok(&[
        "sweep", "--axis", "nbath", "--values", "1,2", "--method", "osmf", "--coupling",
        "0.5", "--ntraj", "200", "--tmax", "1.0", "--seed", "9", "--out",
        out_path.to_str().unwrap(),
    ]);
    let rows = data_rows(&read(&out_path));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][2], "1");
    assert_eq!(rows[1][2], "2");
    // Growth is faster with the larger bath at fixed per-run statistics.
    let l1 = parse_cell(&rows, 0, 4);
    let l2 = parse_cell(&rows, 1, 4);
    assert!(l2 > l1, "expected lambda to grow with bath size: {l1} vs {l2}");
}

#[test]
fn help_prints_to_stdout_and_succeeds() {
    let out = bin().arg("--help").output().expect("binary launches");
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("run"));
    assert!(text.contains("sweep"));
    assert!(text.contains("compare"));
}
