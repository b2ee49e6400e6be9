//! End-to-end runs of the `dualcode` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn dualcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualcode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_schedule(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const COMMUTING_TRIPLE: &str = "n=3\n+XXI\n+ZZX\n+YZZ\n";

#[test]
fn analyze_reports_entropies() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_schedule(dir.path(), "triple.txt", COMMUTING_TRIPLE);
    let o = dualcode(&[
        "analyze",
        "--schedule",
        path.to_str().unwrap(),
        "--subsystem",
        "0",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["tau"], 3);
    assert_eq!(v["recoverable"], true);
    assert_eq!(v["S_A|B"], -1);
    assert_eq!(
        v["g_A"].as_i64().unwrap() + v["g_B"].as_i64().unwrap(),
        v["g"].as_i64().unwrap()
    );
}

#[test]
fn analyze_matches_library_fixture() {
    let text = dualcode::fixtures::commuting_triple().to_text();
    assert_eq!(text, COMMUTING_TRIPLE);
}

#[test]
fn groups_lists_sections() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_schedule(
        dir.path(),
        "alt.txt",
        &dualcode::fixtures::alternating_pairs().to_text(),
    );
    let o = dualcode(&["groups", "--schedule", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("[stabilizer]") && text.contains("[logical]"));
    let stab: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "[stabilizer]")
        .skip(1)
        .take_while(|l| !l.starts_with('['))
        .collect();
    assert_eq!(stab.len(), 2);
}

#[test]
fn distill_emits_one_record_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_schedule(dir.path(), "triple.txt", COMMUTING_TRIPLE);
    let o = dualcode(&[
        "--seed",
        "3",
        "distill",
        "--schedule",
        path.to_str().unwrap(),
        "--subsystem",
        "0",
        "--runs",
        "5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 5);
    for rec in &lines {
        assert_eq!(rec["fidelity_log2"], 0);
    }
}

#[test]
fn verify_lemmas_pass() {
    let o = dualcode(&[
        "verify", "--suite", "lemmas", "--n-max", "4", "--cases", "50",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for line in stdout(&o).lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], true, "{line}");
    }
}

#[test]
fn sweep_writes_csv_with_stable_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let args = [
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
        "sweep",
        "--n",
        "8",
        "--p",
        "0:0.2:0.1",
        "--samples",
        "2",
    ];
    let o = dualcode(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(&out).unwrap();
    let mut lines = first.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,p,sample,seed,S_half,S_half_final,S_R,I_AR_half,decoupled_sites,depth,boundary,spec_hash"
    );
    assert_eq!(lines.count(), 6);
    assert!(dualcode(&args).status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);
}

#[test]
fn fit_reads_sweep_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("points.csv");
    let mut text = String::from("L,S\n");
    for l in 1..=16 {
        let x = l as f64;
        text.push_str(&format!("{l},{}\n", 0.5 * x + x.powf(0.4)));
    }
    std::fs::write(&csv, text).unwrap();
    let o = dualcode(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--x",
        "L",
        "--y",
        "S",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!((v["gamma"].as_f64().unwrap() - 0.4).abs() < 0.05);
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_schedule(dir.path(), "bad.txt", "n=2\n+ZZ\n+ZQ\n");
    let o = dualcode(&[
        "analyze",
        "--schedule",
        path.to_str().unwrap(),
        "--subsystem",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(dualcode(&["sweep"]).status.code(), Some(1));
    assert_eq!(dualcode(&["no-such-command"]).status.code(), Some(1));
    let o = dualcode(&[
        "analyze",
        "--schedule",
        "/nonexistent/file",
        "--subsystem",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(dualcode(&["--help"]).status.code(), Some(0));
}
