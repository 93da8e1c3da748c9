use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sphereiso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphereiso")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn without_wall_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

fn gen_into(dir: &Path, extra: &[&str]) -> Value {
    let mut args = vec!["gen", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = sphereiso(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    report(&out)
}

#[test]
fn gen_writes_space_swaps_and_planted_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let rep = gen_into(dir.path(), &["--atoms", "8", "--p", "2", "--seed", "7"]);
    let files: Vec<&str> = rep["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert!(files.contains(&"space.json"));
    assert_eq!(files.iter().filter(|f| f.starts_with("swap_") && f.ends_with(".operator.json")).count(), 7);
    assert!(files.contains(&"planted.json"));
    assert!(!files.contains(&"perturbed.json"));
    for f in files {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
}

#[test]
fn exact_mode_writes_rational_weights_only() {
    let dir = tempfile::tempdir().unwrap();
    gen_into(dir.path(), &["--atoms", "6", "--p", "3", "--mode", "exact"]);
    for name in ["space.json", "planted.domain.json", "planted.codomain.json"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        for atom in v["atoms"].as_array().unwrap() {
            let w = &atom["weight"];
            let rational = w.is_u64() || (w.get("num").is_some_and(Value::is_i64) && w.get("den").is_some_and(Value::is_u64));
            assert!(rational, "{name}: weight {w} is not an integer or fraction");
        }
    }
}

#[test]
fn planted_bundles_are_extracted_exactly() {
    let dir = tempfile::tempdir().unwrap();
    gen_into(dir.path(), &["--atoms", "5", "--p", "2", "--seed", "11"]);
    for bundle in ["planted.json", "swap_0.json", "swap_3.json"] {
        let out = sphereiso(&["run", "extract", dir.path().join(bundle).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{bundle}");
        let rep = report(&out);
        let suite = &rep["suites"][0];
        assert_eq!(suite["summary"]["verdict"]["verdict"], "extendable");
        assert_eq!(suite["summary"]["matches_bundle"], true);
        assert_eq!(suite["max_metric"].as_f64(), Some(0.0));
    }
}

#[test]
fn perturbed_bundle_is_rejected_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    gen_into(dir.path(), &["--atoms", "6", "--p", "2", "--seed", "4", "--adversarial", "perturb:0.01"]);
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("perturbed.json")).unwrap()).unwrap();
    assert_eq!(manifest["oracle"]["kind"], "perturbed");
    let out = sphereiso(&["run", "extract", dir.path().join("perturbed.json").to_str().unwrap(), "--mode", "float"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = &report(&out)["suites"][0]["summary"];
    assert_eq!(summary["verdict"]["verdict"], "rejected");
    assert!(summary["verdict"]["deviation"].as_f64().unwrap() > 1e-3);
}

#[test]
fn verify_accepts_planted_and_flags_perturbed() {
    let dir = tempfile::tempdir().unwrap();
    gen_into(dir.path(), &["--atoms", "4", "--p", "1.5", "--mode", "float", "--adversarial", "perturb:0.05"]);
    for (bundle, agrees) in [("planted.json", true), ("perturbed.json", false)] {
        let out = sphereiso(&["run", "verify", dir.path().join(bundle).to_str().unwrap(), "--mode", "float"]);
        assert_eq!(out.status.code(), Some(0), "{bundle}");
        let summary = &report(&out)["suites"][0]["summary"];
        assert_eq!(summary["operator_is_isometry"], true);
        assert_eq!(summary["agreement"]["passed"], agrees);
    }
}

#[test]
fn external_oracle_runs_as_a_subprocess() {
    let dir = tempfile::tempdir().unwrap();
    let space = r#"{"atoms": [{"id": "a", "weight": 1}, {"id": "b", "weight": {"num": 1, "den": 2}}]}"#;
    std::fs::write(dir.path().join("space.json"), space).unwrap();
    let op = r#"{"p": 2, "atom_map": {"a": "a", "b": "b"}, "h": {"a": 1, "b": 1}}"#;
    std::fs::write(dir.path().join("identity.json"), op).unwrap();
    let bundle = r#"{"schema_version": 1, "domain": "space.json", "codomain": "space.json", "operator": "identity.json",
        "oracle": {"kind": "external", "command": ["cat"]}}"#;
    let path = dir.path().join("bundle.json");
    std::fs::write(&path, bundle).unwrap();
    let out = sphereiso(&["run", "extract", path.to_str().unwrap(), "--mode", "float", "--trials", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["suites"][0]["summary"]["verdict"]["verdict"], "extendable");
}

#[test]
fn suite_reports_are_deterministic_apart_from_wall_time() {
    for args in [&["run", "dist", "--trials", "40", "--seed", "9"][..], &["run", "homeo", "--trials", "6", "--atoms", "12"][..]] {
        let (a, b) = (sphereiso(args), sphereiso(args));
        assert!(a.status.success());
        assert_eq!(without_wall_time(report(&a)), without_wall_time(report(&b)));
        let text_a = String::from_utf8(a.stdout).unwrap();
        let text_b = String::from_utf8(b.stdout).unwrap();
        let strip = |t: &str| t.lines().filter(|l| !l.contains("wall_time_ms")).collect::<Vec<_>>().join("\n");
        assert_eq!(strip(&text_a), strip(&text_b));
    }
}

#[test]
fn reports_echo_config_and_results() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("nested/report.json");
    let out = sphereiso(&["run", "dist", "--trials", "25", "--p", "3", "--tol", "1e-6", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["schema_version"], 1);
    assert_eq!(rep["command"], "dist");
    assert_eq!(rep["config"]["flags"]["trials"], 25);
    assert_eq!(rep["config"]["suites"]["restricted_distance"]["exponents"][0].as_f64(), Some(3.0));
    assert_eq!(rep["suites"][0]["records"].as_array().unwrap().len(), 25);
    assert_eq!(rep["passed"], true);
    assert!(rep["wall_time_ms"].is_u64());
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(without_wall_time(saved), without_wall_time(rep));
}

#[test]
fn rn_small_exhaustive_has_no_mismatches() {
    let out = sphereiso(&["run", "rn", "--exhaustive", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = &report(&out)["suites"][0]["summary"];
    assert_eq!(summary["mismatches"], 0);
    assert!(summary["instances"].as_u64().unwrap() > 0);
}

#[test]
fn sharp_runs_on_small_grids() {
    let out = sphereiso(&["run", "sharp", "--atoms", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["passed"], true);
}

#[test]
fn failing_checks_give_exit_code_one() {
    let out = sphereiso(&["run", "dist", "--trials", "20", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["passed"], false);
}

#[test]
fn syntax_errors_report_their_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"schema_version\": 1,\n  \"domain\": oops\n}\n").unwrap();
    let out = sphereiso(&["run", "extract", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.json:3:"), "{err}");
}

#[test]
fn missing_files_are_named() {
    let out = sphereiso(&["run", "verify", "/nonexistent/bundle.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/bundle.json"));
}

#[test]
fn worker_cap_is_honored_and_validated() {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_sphereiso"))
            .args(["run", "dist", "--trials", "10"])
            .env("SPHEREISO_WORKERS", workers)
            .output()
            .unwrap()
    };
    let (one, two) = (run("1"), run("2"));
    assert!(one.status.success() && two.status.success());
    assert_eq!(without_wall_time(report(&one)), without_wall_time(report(&two)));
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn invalid_adversarial_spec_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = sphereiso(&["gen", "--out", dir.path().to_str().unwrap(), "--adversarial", "scale:0.1"]);
    assert!(!out.status.success());
}
