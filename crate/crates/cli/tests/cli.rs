use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn samples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../samples")
}

fn tsop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsop"))
        .args(args)
        .current_dir(samples())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn check_reports_the_future() {
    let out = tsop(&["check", "future.tsop"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("bounds: EMPTY: 1-bounded, FULL: 1-bounded, get: unbounded, put: 1-bounded")
    );
    assert!(text.contains("states: 10 legal / 6 pruned (16 raw)"));
    assert!(text.contains("firing states: #6 1001, #7 01$0, #9 10$1"));
}

#[test]
fn check_warns_about_dead_reactions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dead.tsop");
    let text = fs::read_to_string(samples().join("future.tsop")).unwrap();
    fs::write(
        &path,
        format!("{text}reaction FULL(y) & put(x) -> FULL(x)\n"),
    )
    .unwrap();
    let out = tsop(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(format!("{}{}", stdout(&out), stderr(&out)).contains("never"));
}

#[test]
fn invalid_specs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.tsop");
    fs::write(&path, "object A\nprotocol *a . a\nstate a()\n").unwrap();
    let out = tsop(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not well-formed"), "{}", stderr(&out));
    assert_eq!(tsop(&["check", "missing.tsop"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(
        tsop(&["automaton", "future.tsop", "--format", "yaml"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(tsop(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tsop(&["--help"]).status.code(), Some(0));
}

#[test]
fn automaton_exports() {
    let dot = tsop(&["automaton", "future.tsop"]);
    assert_eq!(dot.status.code(), Some(0));
    assert!(stdout(&dot).starts_with("digraph \"Future\" {"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("future.json");
    let out = tsop(&[
        "automaton",
        "future.tsop",
        "--format",
        "json",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json = fs::read_to_string(&path).unwrap();
    let a = tsop_core::automaton::import_json(&json).unwrap();
    assert_eq!(a.states().len(), 10);
}

#[test]
fn generate_writes_the_committed_source() {
    let dir = tempfile::tempdir().unwrap();
    let out = tsop(&[
        "generate",
        "future.tsop",
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let written = fs::read_to_string(dir.path().join("Future.rs")).unwrap();
    let committed =
        fs::read_to_string(samples().join("../crates/generated/src/objects/Future.rs")).unwrap();
    assert_eq!(written, committed);

    let missing = dir.path().join("nope");
    let out = tsop(&["generate", "future.tsop", "-o", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("does not exist"));
}

#[test]
fn simulate_matches_goldens() {
    for name in ["future_pending", "future_double_empty", "future_double_put"] {
        let script = format!("scripts/{name}.sim");
        let out = tsop(&["simulate", "future.tsop", &script]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        let golden = fs::read_to_string(samples().join(format!("scripts/{name}.trace"))).unwrap();
        assert_eq!(stdout(&out), golden, "{name}");
    }
    for (spec, script) in [
        ("lock.tsop", "lock.sim"),
        ("bag.tsop", "bag.sim"),
        ("cell.tsop", "cell.sim"),
        ("pool.tsop", "pool.sim"),
    ] {
        let out = tsop(&["simulate", spec, &format!("scripts/{script}")]);
        assert_eq!(out.status.code(), Some(0), "{script}: {}", stdout(&out));
    }
}

#[test]
fn failed_expectations_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wrong.sim");
    fs::write(
        &path,
        "send EMPTY\ncall p = put(1)\ncall g = get()\nexpect g returns 2\n",
    )
    .unwrap();
    let out = tsop(&["simulate", "future.tsop", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("result: FAIL at line 4"));
}

#[test]
fn malformed_scripts_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.sim");
    fs::write(&path, "send nothing\n").unwrap();
    assert_eq!(
        tsop(&["simulate", "future.tsop", path.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn threaded_simulation() {
    let out = tsop(&[
        "simulate",
        "future.tsop",
        "scripts/future_pending.sim",
        "--threads",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("result: pass"));
    let out = tsop(&[
        "simulate",
        "future.tsop",
        "scripts/future_double_empty.sim",
        "--threads",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}
