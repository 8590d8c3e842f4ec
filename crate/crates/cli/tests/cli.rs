use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn groverlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groverlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("GROVERLAB_SEED")
        .output()
        .unwrap()
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = groverlab(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str], dir: &Path) -> Value {
    serde_json::from_str(&ok(args, dir)).unwrap()
}

fn failure(args: &[&str]) -> (i32, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = groverlab(args, dir.path());
    assert!(!out.status.success(), "{args:?} should fail");
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

const BASE: [&str; 7] = ["--n", "4", "--goal", "1110", "--variant", "noancilla", "--seed=7"];
const CIRCUIT: [&str; 6] = ["--n", "4", "--goal", "1110", "--variant", "noancilla"];

#[test]
fn run_reports_exact_selectivity_and_sampled_counts() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&[&["run"], &BASE[..], &["--r", "1", "--shots", "1000"]].concat(), dir.path());
    let p_goal = v["selectivity"]["p_goal"].as_f64().unwrap();
    assert!((p_goal - 121.0 / 256.0).abs() < 1e-12);
    assert_eq!(v["selectivity"]["recognized"], true);
    let counts: u64 = v["histogram"]["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(counts, 1000);
    assert!(v["sampled_selectivity"]["s_db"].is_number());
    assert_eq!(v["metrics"]["width"], 4);
    assert_eq!(v["config"]["shots"], 1000);
    assert_eq!(v["config"]["goal"], "1110");
    assert!(v["tool"]["version"].is_string());
}

#[test]
fn zero_repetitions_give_the_uniform_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&[&["run"], &BASE[..], &["--r", "0"]].concat(), dir.path());
    for p in v["distribution"]["probs"].as_array().unwrap() {
        assert!((p.as_f64().unwrap() - 1.0 / 16.0).abs() < 1e-12);
    }
}

#[test]
fn histogram_csv_uses_msb_first_bitstrings() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[&["run"], &BASE[..], &["--json", "r.json", "--csv", "h.csv"]].concat(), dir.path());
    let csv = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "bitstring,count,probability");
    assert_eq!(lines.len(), 17);
    assert!(lines[15].starts_with("1110,"));
    assert!(lines[1].starts_with("0000,"));
}

#[test]
fn defaults_are_materialized() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&["run", "--n", "3", "--goal", "101"], dir.path());
    let cfg = &v["config"];
    assert_eq!(cfg["repetitions"], 1);
    assert_eq!(cfg["shots"], 1000);
    assert_eq!(cfg["seed"], 0);
    assert_eq!(cfg["variant"], "noancilla");
    assert_eq!(cfg["transpiled"], false);
    let noisy = json(&["run-noisy", "--n", "3", "--goal", "101"], dir.path());
    assert_eq!(noisy["config"]["shots"], 4000);
    assert_eq!(noisy["config"]["noise"]["p1"], 0.0);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"n": 4, "goal": "0011", "r": 2, "shots": 50, "variant": "oneancilla"}"#,
    )
    .unwrap();
    let v = json(&["run", "--config", "cfg.json", "--shots", "80"], dir.path());
    assert_eq!(v["config"]["goal"], "0011");
    assert_eq!(v["config"]["repetitions"], 2);
    assert_eq!(v["config"]["variant"], "oneancilla");
    assert_eq!(v["config"]["shots"], 80);
    assert_eq!(v["metrics"]["width"], 5);
}

#[test]
fn seed_environment_variable_overrides_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, seed: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_groverlab"));
        cmd.args(["run", "--n", "4", "--goal", "1110", "--seed", seed]).current_dir(dir.path());
        match env {
            Some(v) => cmd.env("GROVERLAB_SEED", v),
            None => cmd.env_remove("GROVERLAB_SEED"),
        };
        let out = cmd.output().unwrap();
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    let with_env = run(Some("99"), "1");
    assert_eq!(with_env["config"]["seed"], 99);
    assert_eq!(with_env["histogram"], run(None, "99")["histogram"]);
}

#[test]
fn noisy_run_uses_noisy_selectivity() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        &["run-noisy"],
        &BASE[..],
        &["--p1", "0.003", "--p2", "0.02", "--eps-ro", "0.01", "--shots", "4000", "--transpiled"],
    ]
    .concat();
    let v = json(&args, dir.path());
    assert_eq!(v["histogram"]["shots"], 4000);
    let noisy = v["selectivity"]["p_goal"].as_f64().unwrap();
    let ideal = v["ideal_selectivity"]["p_goal"].as_f64().unwrap();
    assert!((ideal - 121.0 / 256.0).abs() < 1e-12);
    assert!(noisy < ideal);
    assert_eq!(v["config"]["noise"]["eps_ro"], 0.01);
}

#[test]
fn noiseless_sweep_follows_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let csv = ok(
        &[&["sweep"], &BASE[..], &["--r", "1,2,3", "--p", "0", "--shots", "200000"]].concat(),
        dir.path(),
    );
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("R,p1,p2,shots,seed,p_goal,s_db,recognized"));
    let want = [0.4727, 0.9077, 0.9613];
    for (line, w) in lines.zip(want) {
        let p: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!((p - w).abs() < 0.005, "{line}");
    }
}

#[test]
fn sweep_rows_cover_the_grid_and_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let csv = ok(
        &[&["sweep"], &BASE[..], &["--r", "1,2", "--p", "0,0.02", "--seeds", "3", "--shots", "100"]].concat(),
        dir.path(),
    );
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 12);
    assert!(rows[0].starts_with("1,0.0,0.0,100,7,"));
    assert!(rows[2].starts_with("1,0.0,0.0,100,9,"));
    assert!(rows[11].starts_with("2,0.02,0.02,100,9,"));
}

#[test]
fn build_writes_qasm_matching_metrics() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[&["build"], &CIRCUIT[..], &["--decompose", "--qasm", "g.qasm"]].concat(), dir.path());
    let qasm = std::fs::read_to_string(dir.path().join("g.qasm")).unwrap();
    assert!(qasm.starts_with("OPENQASM 2.0;\n"));
    assert!(qasm.contains("qreg q[4];\ncreg c[4];\n"));
    let gates = groverlab::qasm::count_gate_lines(&qasm);
    let v = json(&[&["run"], &BASE[..], &["--transpiled"]].concat(), dir.path());
    assert_eq!(gates as u64, v["metrics"]["total_gates"].as_u64().unwrap());
    let routed = ok(&[&["build"], &CIRCUIT[..], &["--route", "heavy-hex27"]].concat(), dir.path());
    assert!(routed.contains("swap") || routed.contains("cx"));
}

#[test]
fn report_compares_two_results() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[&["run"], &BASE[..], &["--json", "a.json"]].concat(), dir.path());
    ok(&[&["run"], &BASE[..], &["--json", "b.json"]].concat(), dir.path());
    ok(&[&["run-noisy"], &BASE[..], &["--p1", "0.05", "--p2", "0.05", "--json", "c.json"]].concat(), dir.path());
    let same = ok(&["report", "--compare", "a.json", "b.json"], dir.path());
    assert!(same.contains("tv_distance: 0.000000"), "{same}");
    let diff = ok(&["report", "--compare", "a.json", "c.json"], dir.path());
    assert!(!diff.contains("tv_distance: 0.000000"));
    assert!(diff.contains("s_db") && diff.contains("p_max_other"));
}

#[test]
fn errors_are_single_machine_readable_lines() {
    let cases: [(&[&str], &str); 5] = [
        (&["run", "--n", "4", "--goal", "111"], "kind=validation"),
        (&["run", "--n", "4", "--goal", "1110", "--variant", "sdp", "--ancilla", "0"], "kind=validation"),
        (&["run", "--n", "4", "--goal", "1110", "--frobnicate"], "kind=usage"),
        (&["build", "--n", "4", "--goal", "1110"], "kind=unsupported-gate"),
        (&["report", "--compare", "missing.json", "other.json"], "kind=io"),
    ];
    for (args, kind) in cases {
        let (code, stderr) = failure(args);
        assert_ne!(code, 0);
        assert_eq!(stderr.lines().count(), 1, "{stderr}");
        assert!(stderr.starts_with("error: ") && stderr.contains(kind), "{args:?}: {stderr}");
        assert!(stderr.contains("message=\""));
    }
}

#[test]
fn help_and_version_still_work() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ok(&["--help"], dir.path()).contains("run-noisy"));
    assert!(ok(&["--version"], dir.path()).starts_with("groverlab "));
}
