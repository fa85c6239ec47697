use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn wtdyn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wtdyn"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn header(dir: &Path, name: &str) -> String {
    read(dir, name).lines().next().unwrap().to_string()
}

#[test]
fn every_subcommand_writes_its_header() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("orbit", "n,p_norm,support_lo,support_hi"),
        ("hull", "N,distance,fw_gap,truncation_mass"),
        ("demo-transitivity", "k,q1,q2,q3,identity_residual"),
        ("probe-functionals", "functional_id,sup,attained_n,growth_flag"),
        ("probe-spectrum", "re_lambda,im_lambda,forward_ratio,backward_ratio,verdict"),
        ("theorem-b", "n,min_phi,statistic"),
    ];
    for (cmd, want) in cases {
        let out = wtdyn(dir.path(), &[cmd, "--preset", "example2"]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(header(dir.path(), &format!("{cmd}.csv")), want);
        let json: Value = serde_json::from_str(&read(dir.path(), &format!("{cmd}.json"))).unwrap();
        assert_eq!(json["command"], cmd);
    }
    // nothing but the outputs is left behind
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 12, "{names:?}");
}

#[test]
fn orbit_norms_for_example2() {
    let dir = TempDir::new().unwrap();
    assert!(wtdyn(dir.path(), &["orbit", "--preset", "example2", "--seed-vector", "0:1", "-n", "5"])
        .status
        .success());
    let norms: Vec<String> = read(dir.path(), "orbit.csv")
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(norms, vec!["1"; 6]);
}

#[test]
fn hull_of_pure_shift() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("shift.json");
    std::fs::write(
        &config,
        r#"{"group": {"kind": "integers"}, "step": 1, "window": [-2, 2],
            "weight": {"kind": "eventually_constant", "left_tail": 1, "right_tail": 1, "core_lo": 0}}"#,
    )
    .unwrap();
    let out = wtdyn(
        dir.path(),
        &["hull", "--config", config.to_str().unwrap(), "--seed-vector", "0:1", "--target", "0:0", "-n", "3"],
    );
    assert!(out.status.success());
    let last = read(dir.path(), "hull.csv").lines().last().unwrap().to_string();
    let distance: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((distance - 0.5).abs() < 1e-12);
}

#[test]
fn transitivity_identity_on_example1() {
    let dir = TempDir::new().unwrap();
    assert!(wtdyn(dir.path(), &["demo-transitivity", "--preset", "example1", "-k", "1..60"])
        .status
        .success());
    let rows: Vec<Vec<f64>> = read(dir.path(), "demo-transitivity.csv")
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 60);
    assert!(rows.iter().all(|r| r[4] < 1e-8));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let malformed = write("malformed.json", "{ \"group\": ");
    let step_zero = write(
        "zero.json",
        r#"{"group": {"kind": "integers"}, "step": 0, "window": [0, 1],
            "weight": {"kind": "eventually_constant", "left_tail": 1, "right_tail": 1, "core_lo": 0}}"#,
    );
    let ratio = write(
        "ratio.json",
        r#"{"group": {"kind": "reals", "grid_spacing": 0.25}, "step": 0.3, "window": [0, 1],
            "weight": {"kind": "eventually_constant", "left_tail": 1, "right_tail": 1, "core_lo": 0}}"#,
    );
    let code = |args: &[&str]| wtdyn(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["classify", "--config", &malformed]), 3);
    assert_eq!(code(&["classify", "--config", &step_zero]), 4);
    assert_eq!(code(&["classify", "--preset", "example9"]), 4);
    assert_eq!(code(&["classify", "--config", &ratio]), 5);
    assert_eq!(code(&["orbit", "--preset", "example2", "--seed-vector", "0:x"]), 6);
    assert_eq!(code(&["classify", "--config", "/nonexistent/config.json"]), 8);
    assert_eq!(code(&["no-such-command", "--preset", "example2"]), 2);
    // a regular file where the output directory should be
    let blocker = write("blocker", "");
    let out = Command::new(env!("CARGO_BIN_EXE_wtdyn"))
        .args(["theorem-b", "--preset", "example2", "--out", &blocker])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(8));
}

#[test]
fn classify_is_deterministic_and_round_trips() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for preset in ["example1", "example2"] {
        assert!(wtdyn(a.path(), &["classify", "--preset", preset, "--rng-seed", "11"]).status.success());
        assert!(wtdyn(b.path(), &["classify", "--preset", preset, "--rng-seed", "11"]).status.success());
        let first = read(a.path(), "classify.json");
        assert_eq!(first, read(b.path(), "classify.json"));
        // feed the embedded config back in
        let report: Value = serde_json::from_str(&first).unwrap();
        let config = b.path().join("embedded.json");
        std::fs::write(&config, serde_json::to_string(&report["config"]).unwrap()).unwrap();
        assert!(wtdyn(b.path(), &["classify", "--config", config.to_str().unwrap()]).status.success());
        assert_eq!(first, read(b.path(), "classify.json"));
    }
}

#[test]
fn overrides_land_in_the_embedded_config() {
    let dir = TempDir::new().unwrap();
    let out = wtdyn(
        dir.path(),
        &["classify", "--preset", "example2", "--budget", "100", "--tolerance", "0.001", "--rng-seed", "5"],
    );
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&read(dir.path(), "classify.json")).unwrap();
    assert_eq!(report["config"]["budget"], 100);
    assert_eq!(report["config"]["tolerance"], 0.001);
    assert_eq!(report["config"]["rng_seed"], 5);
    assert_eq!(report["theorem_a"]["verdict"]["status"], "PASS");
    assert_eq!(report["theorem_a"]["c_sequence"].as_array().unwrap().len(), 100);
}

#[test]
fn probe_functionals_follow_the_seed() {
    let run = |seed: &str| {
        let dir = TempDir::new().unwrap();
        assert!(wtdyn(dir.path(), &["probe-functionals", "--preset", "example1", "--rng-seed", seed, "-n", "40"])
            .status
            .success());
        read(dir.path(), "probe-functionals.json")
    };
    assert_eq!(run("3"), run("3"));
    assert_ne!(run("3"), run("4"));
}
