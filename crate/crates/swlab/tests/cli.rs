use std::path::Path;
use std::process::{Command, Output};

use swlab::ledger::parse_ledger;
use swlab::record::CheckRecord;

fn swlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swlab"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read_ledger(p: &Path) -> Vec<CheckRecord> {
    parse_ledger(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn reduce_check_to_stdout() {
    let o = swlab(&["reduce-check", "--grid", "16", "--seed", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let recs = parse_ledger(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert!(recs.len() >= 3);
    assert!(recs.iter().all(|r| r.suite() == "reduce" && r.pass));
    assert!(recs.iter().any(|r| r.check_id == "reduce.negative_control"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["frobnicate"][..],
        &[][..],
        &["reduce-check", "--tol", "-1"],
        &["reduce-check", "--tol", "abc"],
        &["reduce-check", "--h-mode", "sideways"],
        &["reduce-check", "--grid", "4"],
        &["reduce-check", "--config", "/nonexistent-swlab.toml"],
    ] {
        let o = swlab(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "grid = 16\nseed = 3\n").unwrap();
    assert_eq!(code(&swlab(&["all", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn unreachable_output_exits_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("ledger.jsonl");
    let o = swlab(&["reduce-check", "--grid", "16", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(!out.exists());

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let snap = blocker.join("snaps");
    let o = swlab(&[
        "reduce-check",
        "--grid",
        "16",
        "--snapshot",
        snap.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    assert!(o.stdout.is_empty());
}

#[test]
fn check_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.jsonl");
    let o = swlab(&[
        "reduce-check",
        "--grid",
        "16",
        "--tol",
        "1e-300",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let recs = read_ledger(&out);
    assert!(recs.iter().any(|r| r.check_id == "reduce.discrepancy" && !r.pass));
    assert!(recs.iter().any(|r| r.pass));
}

#[test]
fn ledger_appends_whole_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.jsonl");
    let args = ["reduce-check", "--grid", "16", "--out", out.to_str().unwrap()];
    assert_eq!(code(&swlab(&args)), 0);
    let first = read_ledger(&out);
    assert_eq!(code(&swlab(&args)), 0);
    let both = read_ledger(&out);
    assert_eq!(both.len(), 2 * first.len());
    for (a, b) in first.iter().zip(&both[first.len()..]) {
        assert_eq!(a.without_time(), b.without_time());
    }
}

#[test]
fn config_file_selects_suites_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.jsonl");
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        format!(
            "suites = [\"quillen\", \"reduce\"]\ngrid = 16\nseeds = [7, 8]\nh_mode = \"general\"\nout = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = swlab(&["all", "--config", cfg.to_str().unwrap(), "--h-mode", "unit"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let recs = read_ledger(&out);
    let suites: std::collections::BTreeSet<_> = recs.iter().map(|r| r.suite().to_string()).collect();
    assert_eq!(suites.into_iter().collect::<Vec<_>>(), ["quillen", "reduce"]);
    // Dependency order: reduction records come first.
    assert_eq!(recs[0].suite(), "reduce");
    assert!(recs.iter().any(|r| r.check_id == "quillen.pm_identity"));
    let seeds: std::collections::BTreeSet<_> = recs
        .iter()
        .filter_map(|r| r.parameters.get("seed").and_then(|s| s.as_u64()))
        .collect();
    assert_eq!(seeds.into_iter().collect::<Vec<_>>(), [7, 8]);
}

#[test]
fn general_h_reports_without_asserting() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.jsonl");
    let o = swlab(&[
        "quillen-check",
        "--grid",
        "16",
        "--h-mode",
        "general",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let recs = read_ledger(&out);
    assert!(recs.iter().all(|r| r.check_id != "quillen.pm_identity"));
    let reports = std::fs::read_to_string(dir.path().join("q.quillen.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = reports
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    for l in &lines {
        assert_eq!(l["h_mode"], "general");
        assert!(l["pm"]["rel_err"].as_f64().unwrap().is_finite());
    }
}

#[test]
fn full_suite_is_deterministic_with_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(format!("{name}.jsonl"));
        let snap = dir.path().join(format!("{name}-snap"));
        let o = swlab(&[
            "all",
            "--grid",
            "16",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
            "--snapshot",
            snap.to_str().unwrap(),
        ]);
        (o, read_ledger(&out), snap)
    };
    let (o1, l1, s1) = run("a");
    let (o2, l2, s2) = run("b");
    assert_eq!(code(&o1), code(&o2));
    let strip = |l: &[CheckRecord]| l.iter().map(CheckRecord::without_time).collect::<Vec<_>>();
    assert_eq!(strip(&l1), strip(&l2));
    for suite in ["reduce", "patch", "liouville", "index", "symplectic", "quillen"] {
        assert!(l1.iter().any(|r| r.suite() == suite), "{suite}");
    }
    assert!(l1
        .iter()
        .filter(|r| r.check_id.ends_with("snapshot_roundtrip"))
        .all(|r| r.pass));
    for name in [
        "reduce_fields",
        "patch_config",
        "liouville_sigma",
        "links_degree_1",
    ] {
        let a = std::fs::read(s1.join(format!("{name}.swrd"))).unwrap();
        let b = std::fs::read(s2.join(format!("{name}.swrd"))).unwrap();
        assert_eq!(a, b, "{name}");
    }
    for kind in ["trace", "index", "symplectic", "quillen"] {
        let a = std::fs::read_to_string(dir.path().join(format!("a.{kind}.jsonl"))).unwrap();
        let b = std::fs::read_to_string(dir.path().join(format!("b.{kind}.jsonl"))).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{kind}");
    }
}
