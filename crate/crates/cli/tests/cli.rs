use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qsynth_core::automata::{emit_hoa, ltl_to_ucw};
use qsynth_core::ltl::parse_formula;
use qsynth_core::{Controller, Specification};

fn qsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsynth"))
        .args(args)
        .env_remove("QSYNTH_STATE_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn fixture(name: &str) -> String {
    repo().join("fixtures").join(format!("{name}.spec")).display().to_string()
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(rel)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fixpoint_solves_xiffy() {
    let out = qsynth(&["synth", "--backend", "fixpoint", "--k", "1", &fixture("xiffy")]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).starts_with("REALIZABLE xiffy fixpoint"));
}

#[test]
fn exact_backends_report_unrealizable() {
    for backend in ["fixpoint", "vi"] {
        let out = qsynth(&["synth", "--backend", backend, &fixture("yiffx")]);
        assert_eq!(code(&out), 10);
        assert!(stdout(&out).starts_with("UNREALIZABLE"));
    }
}

#[test]
fn learner_gives_up_on_false() {
    let out = qsynth(&["synth", "--backend", "dqs", "--seed", "7", "--episodes", "5", &fixture("false")]);
    assert_eq!(code(&out), 20);
    assert!(stdout(&out).starts_with("UNKNOWN false DQS episodes=5"));
}

#[test]
fn learner_solves_xiffy_with_named_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsynth(&[
        "synth",
        "--backend",
        "dqs",
        "--config",
        "DDQS[-,φ]",
        "--seed",
        "1",
        "--out-dir",
        s(dir.path()),
        &fixture("xiffy"),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("SOLVED xiffy DDQS[-,φ] episodes="));
    let c = Controller::from_json(&fs::read_to_string(dir.path().join("xiffy.controller.json")).unwrap()).unwrap();
    assert_eq!(c.env_vars, ["x"]);
    assert!(fs::read_to_string(dir.path().join("xiffy.controller.dot")).unwrap().starts_with("digraph"));
}

#[test]
fn errors_exit_at_least_30() {
    let out = qsynth(&["synth", "/nonexistent/none.spec"]);
    assert!(code(&out) >= 30);
    assert!(String::from_utf8_lossy(&out.stderr).contains("none.spec"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.spec");
    fs::write(&bad, "inputs x; outputs y; formula G (x <-> ;").unwrap();
    assert!(code(&qsynth(&["synth", s(&bad)])) >= 30);

    assert!(code(&qsynth(&["synth", "--backend", "dqs", "--config", "DQS[?]", &fixture("xiffy")])) >= 30);
}

#[test]
fn state_budget_overflow_has_its_own_code() {
    let out = qsynth(&["synth", "--state-budget", "2", &fixture("arbiter2")]);
    assert_eq!(code(&out), 32);
}

#[test]
fn verify_stored_and_tampered_controllers() {
    let dir = tempfile::tempdir().unwrap();
    let out = qsynth(&["synth", "--out-dir", s(dir.path()), &fixture("xiffy")]);
    assert_eq!(code(&out), 0);
    let path = dir.path().join("xiffy.controller.json");

    let out = qsynth(&["verify", &fixture("xiffy"), s(&path)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("OK"));

    // Budget too small to finish exploring.
    assert_eq!(code(&qsynth(&["verify", "--state-budget", "1", &fixture("xiffy"), s(&path)])), 32);

    let mut c = Controller::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    for row in &mut c.transitions {
        for t in row {
            t.output ^= 1;
        }
    }
    let tampered = dir.path().join("tampered.json");
    fs::write(&tampered, c.to_json()).unwrap();
    let out = qsynth(&["verify", &fixture("xiffy"), s(&tampered)]);
    assert_eq!(code(&out), 31);
    assert!(stdout(&out).starts_with("FAIL"));

    // Controller for a different interface.
    assert!(code(&qsynth(&["verify", &fixture("arbiter2"), s(&path)])) >= 30);
    fs::write(&tampered, "{\"version\": 9}").unwrap();
    assert!(code(&qsynth(&["verify", &fixture("xiffy"), s(&tampered)])) >= 30);
}

#[test]
fn bench_cross_product_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let specs = dir.path().join("specs");
    fs::create_dir(&specs).unwrap();
    for name in ["xiffy", "true"] {
        fs::copy(fixture(name), specs.join(format!("{name}.spec"))).unwrap();
    }
    let run = |csv: &Path| {
        let out = qsynth(&[
            "bench",
            s(&specs),
            "--configs",
            "DQS,DDQS[-,φ]",
            "--seeds",
            "3",
            "--episodes",
            "30",
            "--no-timing",
            "--metrics-csv",
            s(csv),
        ]);
        assert_eq!(code(&out), 0);
        fs::read_to_string(csv).unwrap()
    };
    let first = run(&dir.path().join("a.csv"));
    let second = run(&dir.path().join("b.csv"));
    assert_eq!(first.lines().count(), 13);
    assert_eq!(first, second);
    let rows = qsynth_cli::record::read_csv(first.as_bytes()).unwrap();
    let cells: std::collections::HashSet<_> = rows.iter().map(|r| (&r.benchmark, &r.config, r.seed)).collect();
    assert_eq!(cells.len(), 12);
    assert!(rows.iter().all(|r| r.wall_ms.is_none() && r.error.is_empty()));
}

#[test]
fn bench_golden_micro_suite() {
    let out = qsynth(&[
        "bench",
        s(&data("data/micro")),
        "--configs",
        "fixpoint,vi,dec-fixpoint",
        "--seeds",
        "2",
        "--k",
        "2",
        "--no-timing",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), fs::read_to_string(data("golden/micro.csv")).unwrap());
}

#[test]
fn bench_records_errors_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("xiffy"), dir.path().join("xiffy.spec")).unwrap();
    fs::write(dir.path().join("broken.spec"), "inputs x; formula G x").unwrap();
    let out = qsynth(&["bench", s(dir.path()), "--configs", "fixpoint", "--seeds", "1", "--no-timing"]);
    assert_eq!(code(&out), 0);
    let rows = qsynth_cli::record::read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].status, "error");
    assert!(!rows[0].error.is_empty());
    assert_eq!(rows[1].status, "realizable");
}

#[test]
fn metrics_csv_appends_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    for backend in ["fixpoint", "vi"] {
        qsynth(&["synth", "--backend", backend, "--metrics-csv", s(&csv), &fixture("xiffy")]);
    }
    qsynth(&["synth", "--metrics-csv", s(&csv), "/nonexistent.spec"]);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), qsynth_cli::record::CSV_HEADER);
    let rows = qsynth_cli::record::read_csv(text.as_bytes()).unwrap();
    let configs: Vec<&str> = rows.iter().map(|r| r.config.as_str()).collect();
    assert_eq!(configs, ["fixpoint", "vi", "fixpoint"]);
    assert_eq!(rows[2].status, "error");
    assert!(rows[..2].iter().all(|r| r.controller_size == Some(2) && r.wall_ms.is_some()));
}

#[test]
fn hoa_input_matches_spec_input() {
    let dir = tempfile::tempdir().unwrap();
    let spec = Specification::new(&["x"], &["y"], qsynth_core::Ltl::True);
    let aps = spec.var_names();
    let f = parse_formula("G (x <-> X y)", &spec).unwrap();
    let hoa = dir.path().join("xiffy.hoa");
    fs::write(&hoa, emit_hoa(&ltl_to_ucw(&f, &aps, 4096).unwrap())).unwrap();

    let out = qsynth(&["synth", "--hoa", s(&hoa), "--inputs", "x", "--out-dir", s(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("REALIZABLE xiffy fixpoint controller_states=2"));
    let c = Controller::from_json(&fs::read_to_string(dir.path().join("xiffy.controller.json")).unwrap()).unwrap();
    assert_eq!((c.env_vars.as_slice(), c.sys_vars.as_slice()), (&["x".to_string()][..], &["y".to_string()][..]));

    // With `y` declared as the input the game is the unrealizable mirror.
    let out = qsynth(&["synth", "--hoa", s(&hoa), "--inputs", "y"]);
    assert_eq!(code(&out), 10);
}
