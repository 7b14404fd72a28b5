use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use duhamel::config::ExperimentConfig;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(command: &str, config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duhamel"))
        .args([command, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_single_atom_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("solve", &fixture("single_atom_duhamel.json"), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,functional_id,re,im,side"));
    let row: Vec<&str> = lines.find(|l| l.starts_with("1.5000000000000000e0,")).unwrap().split(',').collect();
    let re: f64 = row[2].parse().unwrap();
    assert!((re - 2.0 * (-1f64).exp()).abs() < 1e-15);
    assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
    assert_eq!(row[4], "interior");

    let sides: Vec<&str> = csv
        .lines()
        .filter(|l| l.starts_with("5.0000000000000000e-1,"))
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(sides, ["left", "right"]);
}

#[test]
fn steady_without_kappa_is_a_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("steady", &fixture("steady_no_kappa.json"), dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("effective_kappa"));
}

#[test]
fn corrupted_snapshots_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("verify", &fixture("corrupted.json"), dir.path());
    assert_eq!(out.status.code(), Some(4));
    let report = read_json(&dir.path().join("verify.json"));
    assert_eq!(report["pass"], Value::Bool(false));
    let residual = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "weak_residual")
        .unwrap();
    assert!(residual["value"].as_f64().unwrap() > 1e-4);
}

#[test]
fn config_errors_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("single_atom_duhamel.json")).unwrap();
    let cases = [
        (text.replace("\"mass\"", "\"mas\""), "source.terms[0].temporal.atoms[0]"),
        (text.replace("\"c\": 1.0", "\"c\": -1.0"), "symbol"),
        (text.replace("\"count\": 5", "\"count\": 0"), "time_grid"),
        ("{".to_string(), ""),
    ];
    for (i, (body, path)) in cases.iter().enumerate() {
        let cfg = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&cfg, body).unwrap();
        let out = run("solve", &cfg, &dir.path().join("out"));
        assert_eq!(out.status.code(), Some(2), "case {i}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("config error") && err.contains(path), "case {i}: {err}");
    }
    let missing = run("solve", &dir.path().join("absent.json"), &dir.path().join("out"));
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn zero_threads_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_duhamel"))
        .args(["solve", "--threads", "0", "--config"])
        .arg(fixture("single_atom_duhamel.json"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn summaries_embed_a_reparseable_config() {
    for (command, name, summary) in [
        ("solve", "segments_mixed.json", "summary.json"),
        ("verify", "cauchy_segments.json", "verify.json"),
        ("asymptotics", "steady_homogeneous.json", "asymptotics.json"),
        ("oracle-compare", "single_atom_duhamel.json", "oracle.json"),
        ("mollifier", "jump_zero_symbol.json", "mollifier.json"),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(command, &fixture(name), dir.path());
        assert_eq!(out.status.code(), Some(0), "{command} {name}: {}", String::from_utf8_lossy(&out.stderr));
        let embedded = read_json(&dir.path().join(summary))["config"].clone();
        let original = ExperimentConfig::from_path(&fixture(name)).unwrap();
        let reparsed = ExperimentConfig::from_json_str(&embedded.to_string()).unwrap();
        assert_eq!(reparsed.normalized(), original.normalized(), "{name}");
        assert_eq!(reparsed.normalized_json(), embedded);
    }
}

#[test]
fn asymptotics_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("asymptotics", &fixture("steady_homogeneous.json"), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("asymptotics.json"));
    let f = &report["functionals"][0];
    for key in ["c_phi", "kappa_declared", "kappa_fitted", "violations", "t_epsilon"] {
        assert!(!f[key].is_null(), "{key}");
    }
    assert_eq!(f["violations"], 0);
    let id = f["id"].as_str().unwrap();
    let csv = std::fs::read_to_string(dir.path().join(format!("asymptotics_{id}.csv"))).unwrap();
    assert_eq!(csv.lines().next(), Some("t,gap,bound"));
}

#[test]
fn mollifier_sequences_approach_both_limits() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("mollifier", &fixture("jump_zero_symbol.json"), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("mollifier.json"));
    let entries = report["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    for e in entries {
        assert!(e["final_error"].as_f64().unwrap() <= 1e-6, "{e}");
    }
    let csv = std::fs::read_to_string(dir.path().join("mollifier_unit_right.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,a_n,re,im"));
}
