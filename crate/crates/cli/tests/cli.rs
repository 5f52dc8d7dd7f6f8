use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qdiscord(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdiscord")).args(args).output().expect("binary runs")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = qdiscord(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Single-row CSV output as (column, value) lookup.
fn csv_record(text: &str) -> impl Fn(&str) -> String {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let row: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    move |col| row[header.iter().position(|h| h == col).unwrap_or_else(|| panic!("no column {col}"))].clone()
}

fn num(s: String) -> f64 {
    s.parse().unwrap()
}

fn schema_path(command: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{command}.schema.json"))
}

fn assert_valid(command: &str, doc: &Value) {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(command)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{command}: {errors:#?}");
}

#[test]
fn bell_state_correlations() {
    let r = csv_record(&ok_stdout(&["correlations", "--rho-phi", "0.5", "--sigma-phi", "0.5"]));
    assert_eq!(num(r("mutual_info")), 2.0);
    assert!((num(r("classical")) - 1.0).abs() < 1e-12);
    assert!((num(r("discord")) - 1.0).abs() < 1e-12);
    assert_eq!(r("regime"), "boundary");
}

#[test]
fn maximally_mixed_is_uncorrelated() {
    let r = csv_record(&ok_stdout(&["correlations", "--maximally-mixed"]));
    for col in ["mutual_info", "classical", "discord", "concurrence"] {
        assert_eq!(num(r(col)), 0.0, "{col}");
    }
}

#[test]
fn unphysical_state_exits_with_2() {
    let out = qdiscord(&["correlations", "--rho-phi", "0.25", "--sigma-phi", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("rho_phi - sigma_phi"), "{err}");
}

#[test]
fn conflicting_occupations_exit_with_2() {
    let out = qdiscord(&["correlations", "--rho-phi", "0.3", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qdiscord(&["correlations", "--sigma-phi", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qdiscord(&["correlations"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn implied_rho_psi() {
    let r = csv_record(&ok_stdout(&["correlations", "--rho-phi", "0.4", "--sigma-phi", "0.1"]));
    assert!((num(r("rho_psi")) - 0.1).abs() < 1e-15);
}

#[test]
fn teleport_extrema_trade_places() {
    let r = csv_record(&ok_stdout(&["teleport", "--delta", "0.3", "--sigma-phi", "0.1", "--extrema"]));
    assert!((num(r("f2_min")) - 0.6).abs() < 1e-12);
    assert_eq!(r("argmin_class"), "equator");
    assert!((num(r("f2_max")) - 0.8).abs() < 1e-12);
    assert_eq!(r("argmax_class"), "poles");

    let r = csv_record(&ok_stdout(&["teleport", "--delta", "0.2", "--sigma-phi", "0.2", "--extrema"]));
    assert!((num(r("f2_min")) - 0.7).abs() < 1e-12);
    assert!((num(r("f2_max")) - 0.7).abs() < 1e-12);
    assert_eq!(r("argmin_class"), "all-states");
}

#[test]
fn teleport_bell_input_is_perfect() {
    let r = csv_record(&ok_stdout(&["teleport", "--bell", "--input", "0", "--oracle"]));
    assert!((num(r("fidelity")) - 1.0).abs() < 1e-12);
    assert!(num(r("max_deviation")) <= 1e-12);
}

#[test]
fn teleport_named_inputs_parse() {
    for input in ["0", "1", "+", "-", "+i", "-i", "plus-i"] {
        let r = csv_record(&ok_stdout(&["teleport", "--delta", "0.2", "--sigma-phi", "0.1", "--input", input]));
        let f = num(r("fidelity"));
        let expected = if input == "0" || input == "1" { 0.7 } else { 0.6 };
        assert!((f - expected).abs() < 1e-12, "{input}: {f}");
    }
}

#[test]
fn teleport_needs_a_question() {
    assert_eq!(qdiscord(&["teleport", "--bell"]).status.code(), Some(2));
}

#[test]
fn trajectory_reports_transition() {
    let out = qdiscord(&["trajectory", "--gamma-relax", "1", "--gamma-phase", "1", "--t-max", "2", "--dt", "0.001"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("regime crossing at t = 0.5000000000 (classical-to-quantum)"), "{err}");
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 2002);
}

#[test]
fn trajectory_without_dephasing_has_no_crossing() {
    let out = qdiscord(&["trajectory", "--gamma-phase", "0", "--t-max", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("regime crossings: none"));
}

#[test]
fn transverse_model_starts_classical() {
    let csv = ok_stdout(&[
        "trajectory", "--model", "transverse", "--gamma-prime", "10", "--gamma-relax", "0.5", "--t-max", "2",
        "--dt", "0.1",
    ]);
    let regimes: Vec<&str> = csv.lines().skip(2).take(5).map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(regimes, ["classical"; 5]);

    let out = qdiscord(&["trajectory", "--model", "transverse", "--gamma-prime", "1", "--t-max", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_marks_unphysical_cells() {
    let csv = ok_stdout(&["sweep", "--n-sigma", "5", "--n-delta", "5"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 26);
    // Δ = −1/2 admits only σ_Φ = 0
    for line in &lines[2..6] {
        assert!(line.contains(",false,"), "{line}");
    }
}

#[test]
fn izodiscord_and_separability_outputs() {
    let csv = ok_stdout(&["izodiscord", "--levels", "0.1", "--n-delta", "3"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("level,delta,sigma_phi"));
    let points: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    // no contour point at Δ = −1/2, where only σ_Φ = 0 is physical
    assert_eq!(points.len(), 2);
    let at_zero = points.iter().find(|p| p[1] == 0.0).unwrap();
    assert!((at_zero[2] - 0.1716115693570173).abs() < 1e-8);

    let csv = ok_stdout(&["separability", "--n-delta", "5"]);
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[2] - v[1]).abs() < 1e-9 && (v[3] - v[1]).abs() < 1e-9, "{line}");
    }

    assert_eq!(qdiscord(&["izodiscord", "--levels", "1.5"]).status.code(), Some(2));
}

#[test]
fn verify_reports_calibration_and_base() {
    let out = qdiscord(&["verify", "chi-calibration"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("PASS chi-calibration") && err.contains("as-printed divergent"), "{err}");

    let out = qdiscord(&["verify", "jump-base", "--seed", "7"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("matched base: log2"));
}

#[test]
fn verify_all_passes() {
    let out = qdiscord(&["verify", "all", "--seed", "7"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(out.status.success(), "{err}");
    assert_eq!(err.lines().filter(|l| l.starts_with("PASS ")).count(), 8, "{err}");
}

#[test]
fn json_outputs_match_schemas() {
    let runs: [(&str, &[&str]); 10] = [
        ("correlations", &["correlations", "--bell", "--oracle"]),
        ("correlations", &["correlations", "--delta", "0.1", "--sigma-phi", "0.2", "--sigma-psi", "0.05"]),
        ("teleport", &["teleport", "--delta", "0.3", "--sigma-phi", "0.1", "--extrema", "--oracle"]),
        ("teleport", &["teleport", "--delta", "0.3", "--sigma-phi", "0.1", "--average", "--oracle", "--samples", "1000"]),
        ("teleport", &["teleport", "--bell", "--theta", "1", "--phi", "2", "--oracle"]),
        ("trajectory", &["trajectory", "--t-max", "1", "--dt", "0.1"]),
        ("sweep", &["sweep", "--n-sigma", "4", "--n-delta", "4"]),
        ("izodiscord", &["izodiscord", "--n-delta", "11"]),
        ("separability", &["separability", "--n-delta", "4", "--delta-min", "-0.5"]),
        ("verify", &["verify", "separability"]),
    ];
    for (command, args) in runs {
        let mut full = args.to_vec();
        full.extend(["--format", "json"]);
        let doc: Value = serde_json::from_str(&ok_stdout(&full)).unwrap();
        assert_eq!(doc["command"], command);
        assert_valid(command, &doc);
    }
}

#[test]
fn schema_rejects_malformed_output() {
    let mut doc: Value = serde_json::from_str(&ok_stdout(&["correlations", "--bell", "--format", "json"])).unwrap();
    doc["data"]["regime"] = Value::from("Boundary");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path("correlations")).unwrap()).unwrap();
    assert!(!jsonschema::validator_for(&schema).unwrap().is_valid(&doc));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let outputs: Vec<Vec<u8>> = ["a", "b"]
            .iter()
            .map(|name| {
                let path = dir.path().join(format!("{name}.{format}"));
                let path_str = path.to_str().unwrap();
                let out = qdiscord(&[
                    "teleport", "--delta", "0.1", "--sigma-phi", "0.2", "--average", "--oracle", "--samples", "20000",
                    "--seed", "3", "--format", format, "--out", path_str,
                ]);
                assert!(out.status.success());
                assert!(out.stdout.is_empty());
                std::fs::read(&path).unwrap()
            })
            .collect();
        assert!(!outputs[0].is_empty());
        assert_eq!(outputs[0], outputs[1], "{format}");
    }
    let a = ok_stdout(&["sweep", "--n-sigma", "21", "--n-delta", "21"]);
    let b = ok_stdout(&["sweep", "--n-sigma", "21", "--n-delta", "21"]);
    assert_eq!(a, b);
}
