use std::fs;
use std::path::Path;

use lpmhd::cli::{run_from, EXIT_PASS, EXIT_USAGE};
use lpmhd::format::{read_series, write_field};
use lpmhd_core::{Field, FrequencyGrid};

fn run(args: &[&str], out: &Path) -> u8 {
    let mut full = vec!["lpmhd"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output-dir", out.to_str().unwrap()]);
    run_from(full)
}

#[test]
fn bony_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["verify", "bony"], dir.path()), EXIT_PASS);
    assert!(dir.path().join("verify_bony.json").exists());
}

#[test]
fn product_indices_outside_the_admissible_range_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["verify", "products", "--s2", "1.5"], dir.path()), EXIT_USAGE);
}

#[test]
fn unknown_suite_and_missing_input_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["verify", "nonsense"], dir.path()), EXIT_USAGE);
    let missing = dir.path().join("absent.bin");
    assert_eq!(run(&["solve", "heat", "--input", missing.to_str().unwrap()], dir.path()), EXIT_USAGE);
}

#[test]
fn zero_iterations_write_a_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(&["iterate", "--max-iterations", "0", "--points", "32"], dir.path());
    assert_eq!(code, EXIT_PASS);
    let text = fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("n,T,E0,H1_lhs,H1_rhs,H2_lhs,H2_rhs,D_n"));
    for name in ["wallclock.csv", "filter_bank.json", "config.toml", "final_u/manifest.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn heat_solve_decays_a_single_mode() {
    let dir = tempfile::tempdir().unwrap();
    let grid = FrequencyGrid::periodic(2, 32).unwrap();
    let mode = |x: [f64; 3]| (3.0 * x[0] + 4.0 * x[1]).cos();
    let input = dir.path().join("f0.bin");
    write_field(&input, &Field::from_fn(grid, 1, |x, v| v[0] = mode(x))).unwrap();
    let code = run(
        &["solve", "heat", "--input", input.to_str().unwrap(), "--points", "32", "--t-max", "0.1", "--dt", "0.01"],
        dir.path(),
    );
    assert_eq!(code, EXIT_PASS);
    let (manifest, series) = read_series(&dir.path().join("heat")).unwrap();
    assert_eq!(manifest.times.len(), 11);
    for (t, snap) in manifest.times.iter().zip(series.snapshots()) {
        let exact = Field::from_fn(grid, 1, |x, v| v[0] = (-25.0 * t).exp() * mode(x));
        assert!(snap.sub(&exact).unwrap().max_magnitude() < 1e-13, "t = {t}");
    }
}

#[test]
fn malformed_config_files_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "points = 32\npoints = 64\n").unwrap();
    assert_eq!(run(&["iterate", "--config", config.to_str().unwrap()], dir.path()), EXIT_USAGE);
    fs::write(&config, "p = 5\n").unwrap();
    assert_eq!(run(&["iterate", "--config", config.to_str().unwrap()], dir.path()), EXIT_USAGE);
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(run_from(["lpmhd", "--help"]), EXIT_PASS);
}
