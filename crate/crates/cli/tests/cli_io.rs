//! End-to-end behavior of the binary: exit codes, file formats, and the
//! config round trip through the JSON sidecar.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rotor")
}

fn run_ok(args: &[&str]) {
    let status = Command::new(bin()).args(args).status().unwrap();
    assert!(status.success(), "rotor {args:?} failed");
}

#[test]
fn usage_errors_exit_2() {
    let status = Command::new(bin()).args(["--mode", "evolve", "--samples", "1"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = Command::new(bin())
        .args(["--mode", "evolve", "--t0", "1.0", "--t1", "0.5"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let status = Command::new(bin()).args(["--mode", "nonsense"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn forced_tiny_truncation_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let status = Command::new(bin())
        .args(["--mode", "verify", "--j", "11", "--jmax", "3", "--out"])
        .arg(&out)
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["all_pass"], serde_json::Value::Bool(false));
    let eigen = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "coherent_eigenrelation_residual")
        .unwrap();
    assert_eq!(eigen["pass"], serde_json::Value::Bool(false));
}

#[test]
fn verify_report_is_repeatable() {
    // identical config (including the output path) must give identical bytes
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mut captured = Vec::new();
    for _ in 0..2 {
        let status = Command::new(bin())
            .args(["--mode", "verify", "--jmax", "3", "--out"])
            .arg(&out)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(1));
        captured.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(captured[0], captured[1]);
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn evolve_csv_shape_and_sidecar_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    run_ok(&[
        "--mode",
        "evolve",
        "--j",
        "11",
        "--samples",
        "40",
        "--t1",
        "1.0",
        "--out",
        out.to_str().unwrap(),
    ]);
    let (header, rows) = read_csv(&out);
    assert_eq!(
        header,
        [
            "t",
            "theta",
            "phi",
            "phi_unwrapped",
            "x3_mean",
            "xplus_re",
            "xplus_im",
            "j1_mean",
            "j2_mean",
            "j3_mean",
            "clamped"
        ]
    );
    assert_eq!(rows.len(), 40);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(*rows.last().unwrap().first().unwrap(), 1.0);

    // the sidecar's embedded config reproduces the run byte for byte
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["j_max_selected"].as_u64().unwrap(), 27);
    let config = sidecar["config"].clone();
    let rerun_out = dir.path().join("rerun.csv");
    run_ok(&[
        "--mode",
        "evolve",
        "--theta-bar",
        &config["theta_bar"].to_string(),
        "--phi-bar",
        &config["phi_bar"].to_string(),
        "--l3",
        &config["l3"].to_string(),
        "--l-norm",
        &config["l_norm"].to_string(),
        "--t0",
        &config["t0"].to_string(),
        "--t1",
        &config["t1"].to_string(),
        "--samples",
        &config["samples"].to_string(),
        "--out",
        rerun_out.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&rerun_out).unwrap());
}

#[test]
fn minimal_density_run_is_sane() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("den.csv");
    run_ok(&[
        "--mode",
        "density",
        "--j",
        "11",
        "--samples",
        "2",
        "--t1",
        "1.0",
        "--grid",
        "16x16",
        "--out",
        out.to_str().unwrap(),
    ]);
    // two time samples -> indexed files
    let (header, rows) = read_csv(&dir.path().join("den.t000.csv"));
    assert_eq!(header, ["theta", "phi", "p"]);
    assert_eq!(rows.len(), 16 * 16);
    assert!(rows.iter().all(|r| r[2] >= 0.0));

    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("den.csv.meta.json")).unwrap())
            .unwrap();
    let fields = sidecar["fields"].as_array().unwrap();
    assert_eq!(fields.len(), 2);
    for f in fields {
        let integral = f["integral"].as_f64().unwrap();
        assert!((integral - 1.0).abs() < 1e-2, "integral {integral}");
    }
}

#[test]
fn trajectory_rows_are_unit_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    run_ok(&[
        "--mode",
        "trajectory",
        "--j",
        "11",
        "--hamiltonian",
        "rotation",
        "--omega3",
        "1.0",
        "--samples",
        "20",
        "--t1",
        "6.0",
        "--out",
        out.to_str().unwrap(),
    ]);
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["t", "x", "y", "z"]);
    let z0 = rows[0][3];
    for r in &rows {
        let n = (r[1] * r[1] + r[2] * r[2] + r[3] * r[3]).sqrt();
        assert!((n - 1.0).abs() < 1e-12);
        assert!((r[3] - z0).abs() < 1e-10, "latitude drifted");
    }
}

#[test]
fn json_format_emits_columns_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.json");
    run_ok(&[
        "--mode",
        "evolve",
        "--j",
        "11",
        "--samples",
        "5",
        "--t1",
        "0.5",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["columns"].as_array().unwrap().len(), 11);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}
