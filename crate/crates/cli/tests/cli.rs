//! End-to-end tests of the binary: exit codes, emitted files, determinism,
//! and the self-consistency of compare.

use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_sofc-cathode");

fn example_config() -> String {
    std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/lscf_example.toml"),
    )
    .unwrap()
}

/// The example config with a smaller sweep grid so tests stay fast.
fn small_config() -> String {
    example_config().replace(
        "temperatures_c = [700.0, 750.0, 800.0, 850.0, 900.0, 950.0]",
        "temperatures_c = [700.0, 800.0]",
    )
}

fn run_cmd(dir: &Path, config: &str, args: &[&str]) -> std::process::Output {
    let config_path = dir.join("config.toml");
    std::fs::write(&config_path, config).unwrap();
    Command::new(BIN)
        .arg("--config")
        .arg(&config_path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn missing_config_exits_2() {
    let output = Command::new(BIN)
        .args(["--config", "/nonexistent/config.toml", "run"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_cmd(dir.path(), "[geometry]\nthickness_m = \"wide\"\n", &["run"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn invalid_parameter_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = example_config().replace("sigma_ion_s_per_m = 0.2", "sigma_ion_s_per_m = -1.0");
    let output = run_cmd(dir.path(), &config, &["run"]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn infeasible_point_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = example_config().replace("j_cell_a_per_m2 = 2000.0", "j_cell_a_per_m2 = 1.0e9");
    let output = run_cmd(dir.path(), &config, &["run"]);
    assert_eq!(output.status.code(), Some(3), "{output:?}");
}

#[test]
fn run_emits_profiles_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_cmd(dir.path(), &example_config(), &["run"]);
    assert!(output.status.success(), "{output:?}");
    let profiles = std::fs::read_to_string(dir.path().join("out/run_profiles.csv")).unwrap();
    let mut lines = profiles.lines();
    assert!(lines.next().unwrap().starts_with("z,y_m,phi_el_v"));
    assert_eq!(lines.count(), 100);
    let summary = std::fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("delta_c_m:"));
}

#[test]
fn nodes_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_cmd(dir.path(), &example_config(), &["--nodes", "37", "run"]);
    assert!(output.status.success(), "{output:?}");
    let profiles = std::fs::read_to_string(dir.path().join("out/run_profiles.csv")).unwrap();
    assert_eq!(profiles.lines().count(), 38);
}

#[test]
fn sweep_is_deterministic_across_runs_and_workers() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let out_a = run_cmd(dir_a.path(), &small_config(), &["--workers", "4", "sweep"]);
    let out_b = run_cmd(dir_b.path(), &small_config(), &["--workers", "1", "sweep"]);
    assert!(out_a.status.success() && out_b.status.success());
    let a = std::fs::read(dir_a.path().join("out/sweep_grid.csv")).unwrap();
    let b = std::fs::read(dir_b.path().join("out/sweep_grid.csv")).unwrap();
    assert_eq!(a, b, "sweep output depends on worker count");
}

#[test]
fn verify_reports_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let config = example_config().replace(
        "node_counts = [20, 50, 100, 200]",
        "node_counts = [20, 50, 100]",
    );
    let output = run_cmd(dir.path(), &config, &["verify"]);
    assert!(output.status.success(), "{output:?}");
    let summary = std::fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("convergence trend holds"));
}

#[test]
fn verify_single_node_count_warns() {
    let dir = tempfile::tempdir().unwrap();
    let config =
        example_config().replace("node_counts = [20, 50, 100, 200]", "node_counts = [20]");
    let output = run_cmd(dir.path(), &config, &["verify"]);
    assert!(output.status.success(), "{output:?}");
    let summary = std::fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("warning: single node count"));
}

#[test]
fn crosscheck_within_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_cmd(dir.path(), &example_config(), &["crosscheck"]);
    assert!(output.status.success(), "{output:?}");
    let summary = std::fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("c_o2_bulk_recovery_rel_error"));
}

#[test]
fn crosscheck_refuses_zero_current() {
    let dir = tempfile::tempdir().unwrap();
    let config = example_config().replace("j_cell_a_per_m2 = 2000.0", "j_cell_a_per_m2 = 0.0");
    let output = run_cmd(dir.path(), &config, &["crosscheck"]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn sensitivity_spans_compositions() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_cmd(dir.path(), &example_config(), &["sensitivity"]);
    assert!(output.status.success(), "{output:?}");
    let table =
        std::fs::read_to_string(dir.path().join("out/sensitivity_composition.csv")).unwrap();
    assert_eq!(table.lines().count(), 8);
    let summary = std::fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    let span: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("delta_c_relative_span: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(span < 0.10, "composition span {span}");
}

#[test]
fn compare_against_self_generated_measurements_has_zero_rms() {
    let dir = tempfile::tempdir().unwrap();

    // Generate "measurements" from the model itself at three currents.
    let mut measured = String::from("j_cell_a_per_m2,sigma_eta_v\n");
    for j in ["500.0", "1000.0", "2000.0"] {
        let run_dir = tempfile::tempdir().unwrap();
        let config =
            example_config().replace("j_cell_a_per_m2 = 2000.0", &format!("j_cell_a_per_m2 = {j}"));
        let output = run_cmd(run_dir.path(), &config, &["run"]);
        assert!(output.status.success());
        let summary = std::fs::read_to_string(run_dir.path().join("out/summary.txt")).unwrap();
        let eta = summary
            .lines()
            .find_map(|l| l.strip_prefix("sigma_eta_v: "))
            .unwrap();
        measured.push_str(&format!("{j},{eta}\n"));
    }
    std::fs::write(dir.path().join("meas.csv"), measured).unwrap();

    let config = format!("{}\n[compare]\nmeasured_csv = \"meas.csv\"\n", example_config());
    let output = run_cmd(dir.path(), &config, &["compare"]);
    assert!(output.status.success(), "{output:?}");
    let summary = std::fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    let rms: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("rms_deviation_v: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(rms < 1e-12, "rms = {rms}");
}

#[test]
fn compare_empty_measurements_warns() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("meas.csv"), "j_cell_a_per_m2,sigma_eta_v\n").unwrap();
    let config = format!("{}\n[compare]\nmeasured_csv = \"meas.csv\"\n", example_config());
    let output = run_cmd(dir.path(), &config, &["compare"]);
    assert!(output.status.success(), "{output:?}");
    let summary = std::fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("warning: measurement file has no data rows"));
}
