//! End-to-end checks of the `divisi` binary: exit codes, table content,
//! JSON determinism, and file round-trips.

use std::path::Path;
use std::process::{Command, Output};

fn divisi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divisi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn divisi_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divisi"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_identity_unitary(path: &Path, qubits: usize) {
    let dim = 1usize << qubits;
    let matrix: Vec<Vec<[f64; 2]>> = (0..dim)
        .map(|i| (0..dim).map(|j| [if i == j { 1.0 } else { 0.0 }, 0.0]).collect())
        .collect();
    let text = serde_json::json!({ "qubits": qubits, "matrix": matrix }).to_string();
    std::fs::write(path, text).unwrap();
}

#[test]
fn w_paper_table_prints_published_values() {
    let out = divisi(&["scenario", "w", "--mode", "paper"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for value in ["0.500000", "0.693130", "0.117708", "0.707107", "0.706249"] {
        assert!(text.contains(value), "missing {value} in:\n{text}");
    }
    assert!(text.contains("System evolution at this step: P-indivisible"));
    assert!(text.contains("Environment evolution at this step: P-divisible"));
    assert!(text.contains("non-unital"));
}

#[test]
fn bell_and_ghz_paper_tables_print_published_values() {
    let out = divisi(&["scenario", "bell", "--mode", "paper"]);
    let text = stdout(&out);
    for value in ["0.500000", "0.499849", "0.707107", "0.706893"] {
        assert!(text.contains(value), "bell missing {value} in:\n{text}");
    }
    assert!(text.contains("System channel: unital"));

    let out = divisi(&["scenario", "ghz", "--mode", "paper"]);
    let text = stdout(&out);
    for value in ["1.000000", "0.999698", "0.000000"] {
        assert!(text.contains(value), "ghz missing {value} in:\n{text}");
    }
}

#[test]
fn ghz_exact_table_has_vanishing_environment_output() {
    let out = divisi(&["scenario", "ghz", "--mode", "exact"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("Environment output trace distance: 0.000000"));
}

#[test]
fn bell_exact_json_preserves_full_distance() {
    let out = divisi(&["scenario", "bell", "--mode", "exact", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let d_in = v["step"]["d_full_in"].as_f64().unwrap();
    let d_out = v["step"]["d_full_out"].as_f64().unwrap();
    let sqrt_half = 0.5f64.sqrt();
    assert!((d_in - sqrt_half).abs() < 1e-9);
    assert!((d_out - sqrt_half).abs() < 1e-9);
    assert_eq!(v["step"]["sys_verdict"], "p_divisible_step");
    assert_eq!(v["system_channel"]["unital"], true);
}

#[test]
fn unknown_scenario_exits_2() {
    let out = divisi(&["scenario", "nope"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown scenario"));
}

#[test]
fn hs_metric_table_uses_hs_labels() {
    let out = divisi(&["scenario", "w", "--mode", "exact", "--metric", "hs"]);
    let text = stdout(&out);
    assert!(text.contains("Hilbert-Schmidt"));
    // joint HS surrogate of the exact pair is 1/2 at both ends
    assert!(text.contains("Full input state Hilbert-Schmidt (squared) distance: 0.500000"));
}

#[test]
fn analyze_identity_unitary_keeps_distances() {
    let dir = tempfile::tempdir().unwrap();
    let upath = dir.path().join("u.json");
    write_identity_unitary(&upath, 2);
    let exp = dir.path().join("exp");
    let out = divisi(&["export", "bell", "--out-dir", exp.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let out = divisi(&[
        "analyze",
        "--unitary",
        upath.to_str().unwrap(),
        "--state1",
        exp.join("state1.json").to_str().unwrap(),
        "--state2",
        exp.join("state2.json").to_str().unwrap(),
        "--split",
        "1:1",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for side in ["sys", "env", "full"] {
        let a = v["step"][format!("d_{side}_in")].as_f64().unwrap();
        let b = v["step"][format!("d_{side}_out")].as_f64().unwrap();
        assert!((a - b).abs() < 1e-12, "{side}: {a} vs {b}");
    }
}

#[test]
fn exported_scenario_reanalyzes_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let exp = dir.path().join("w");
    assert_eq!(code(&divisi(&["export", "w", "--out-dir", exp.to_str().unwrap()])), 0);
    let scenario = divisi(&["scenario", "w", "--mode", "exact", "--format", "json"]);
    let analyze = divisi(&[
        "analyze",
        "--unitary",
        exp.join("unitary.json").to_str().unwrap(),
        "--state1",
        exp.join("state1.json").to_str().unwrap(),
        "--state2",
        exp.join("state2.json").to_str().unwrap(),
        "--split",
        "2:1",
        "--format",
        "json",
    ]);
    assert_eq!(code(&analyze), 0, "{}", stderr(&analyze));
    assert_eq!(stdout(&scenario), stdout(&analyze));
    // and the table renderings agree too
    let t1 = divisi(&["scenario", "w", "--mode", "exact"]);
    let t2 = divisi(&[
        "analyze",
        "--unitary",
        exp.join("unitary.json").to_str().unwrap(),
        "--state1",
        exp.join("state1.json").to_str().unwrap(),
        "--state2",
        exp.join("state2.json").to_str().unwrap(),
        "--split",
        "2:1",
    ]);
    assert_eq!(stdout(&t1), stdout(&t2));
}

#[test]
fn analyze_rejects_non_unitary_without_repair_and_accepts_with() {
    let dir = tempfile::tempdir().unwrap();
    let upath = dir.path().join("defective.json");
    // 2-qubit identity with one inflated entry: not unitary, full rank
    let mut matrix = vec![vec![[0.0f64, 0.0]; 4]; 4];
    for (i, row) in matrix.iter_mut().enumerate() {
        row[i] = [1.0, 0.0];
    }
    matrix[0][0] = [1.25, 0.0];
    let text = serde_json::json!({ "qubits": 2, "matrix": matrix }).to_string();
    std::fs::write(&upath, text).unwrap();
    let exp = dir.path().join("exp");
    divisi(&["export", "bell", "--out-dir", exp.to_str().unwrap()]);

    let s1 = exp.join("state1.json");
    let s2 = exp.join("state2.json");
    let base = [
        "analyze",
        "--unitary",
        upath.to_str().unwrap(),
        "--state1",
        s1.to_str().unwrap(),
        "--state2",
        s2.to_str().unwrap(),
        "--split",
        "1:1",
    ];
    let out = divisi(&base);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("not unitary"), "{}", stderr(&out));
    assert!(stderr(&out).contains("5.6"), "deviation value expected: {}", stderr(&out));

    let mut with_repair = base.to_vec();
    with_repair.push("--repair-polar");
    let out = divisi(&with_repair);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // the repaired matrix is the identity, so distances are preserved
    assert!(stdout(&out).contains("System evolution at this step: P-divisible"));
}

#[test]
fn analyze_malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let upath = dir.path().join("broken.json");
    std::fs::write(&upath, "{ this is not json").unwrap();
    let out = divisi(&[
        "analyze",
        "--unitary",
        upath.to_str().unwrap(),
        "--state1",
        upath.to_str().unwrap(),
        "--state2",
        upath.to_str().unwrap(),
        "--split",
        "1:1",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn validate_accepts_every_exact_scenario_export() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["bell", "ghz", "w"] {
        let exp = dir.path().join(name);
        assert_eq!(code(&divisi(&["export", name, "--out-dir", exp.to_str().unwrap()])), 0);
        let out = divisi(&["validate", "--unitary", exp.join("unitary.json").to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{name} unitary: {}", stderr(&out));
        for state in ["state1.json", "state2.json", "state1_amps.json", "state2_amps.json"] {
            let out = divisi(&["validate", "--state", exp.join(state).to_str().unwrap()]);
            assert_eq!(code(&out), 0, "{name}/{state}: {}", stderr(&out));
        }
    }
}

#[test]
fn validate_needs_exactly_one_input() {
    assert_eq!(code(&divisi(&["validate"])), 2);
}

#[test]
fn witness_uncorrelated_never_reports_growth() {
    let dir = tempfile::tempdir().unwrap();
    let exp = dir.path().join("w");
    divisi(&["export", "w", "--out-dir", exp.to_str().unwrap()]);
    let out = divisi(&[
        "witness",
        "--unitary",
        exp.join("unitary.json").to_str().unwrap(),
        "--split",
        "2:1",
        "--restarts",
        "3",
        "--iters",
        "60",
        "--seed",
        "5",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["growth"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["correlated"], false);
}

#[test]
fn witness_correlated_seeded_with_published_pair_finds_growth() {
    let dir = tempfile::tempdir().unwrap();
    let exp = dir.path().join("w");
    divisi(&["export", "w", "--out-dir", exp.to_str().unwrap()]);
    let out = divisi(&[
        "witness",
        "--unitary",
        exp.join("unitary.json").to_str().unwrap(),
        "--split",
        "2:1",
        "--correlated",
        "--restarts",
        "2",
        "--iters",
        "40",
        "--seed",
        "0",
        "--init1",
        exp.join("state1_amps.json").to_str().unwrap(),
        "--init2",
        exp.join("state2_amps.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["growth"].as_f64().unwrap() >= 0.193130 - 1e-6);
}

#[test]
fn witness_identity_unitary_finds_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let upath = dir.path().join("id.json");
    write_identity_unitary(&upath, 2);
    for correlated in [false, true] {
        let mut args = vec![
            "witness",
            "--unitary",
            upath.to_str().unwrap(),
            "--split",
            "1:1",
            "--restarts",
            "2",
            "--iters",
            "30",
        ];
        if correlated {
            args.push("--correlated");
        }
        let out = divisi(&args);
        assert_eq!(code(&out), 0);
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert!(v["growth"].as_f64().unwrap().abs() <= 1e-9);
    }
}

#[test]
fn divisi_tol_env_var_overrides_verdict() {
    // a tolerance larger than the W growth suppresses the indivisible flag
    let out = divisi_env(&["scenario", "w", "--mode", "exact"], "DIVISI_TOL", "0.5");
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("System evolution at this step: P-divisible"));
    let out = divisi_env(&["scenario", "w", "--mode", "exact"], "DIVISI_TOL", "not-a-number");
    assert_eq!(code(&out), 2);
}

#[test]
fn arbitrary_system_index_split_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let exp = dir.path().join("w");
    divisi(&["export", "w", "--out-dir", exp.to_str().unwrap()]);
    // system {0,1} spelled as an index list instead of 2:1
    let a = divisi(&[
        "analyze",
        "--unitary",
        exp.join("unitary.json").to_str().unwrap(),
        "--state1",
        exp.join("state1.json").to_str().unwrap(),
        "--state2",
        exp.join("state2.json").to_str().unwrap(),
        "--system",
        "0,1",
        "--format",
        "json",
    ]);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    let b = divisi(&["scenario", "w", "--mode", "exact", "--format", "json"]);
    assert_eq!(stdout(&a), stdout(&b));
}
