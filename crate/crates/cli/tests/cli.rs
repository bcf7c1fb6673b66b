use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spacestat"))
        .args(args)
        .env_remove("SPACESTAT_CACHE_DIR")
        .output()
        .unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn deficiency_example_emits_counting_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path(), "d.json");
    let o = run(&["deficiency", "--n", "4", "--m", "8", "--family", "full", "--out", &out]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(Path::new(&out));
    assert_eq!(r["schema"], "spacestat-report/1");
    assert_eq!(r["config"]["command"], "deficiency");
    assert_eq!(r["config"]["family"], "full_space");
    let table = r["tables"]["counting"].as_str().unwrap();
    assert!(table.starts_with("t,count,bound\n0,0,1\n"));
    assert_eq!(table.lines().count(), 18);
    assert_eq!(r["results"]["pairs"], 16);
}

#[test]
fn lemma_example_reports_frequencies() {
    let o = run(&["lemma-prob", "--k", "3", "--n", "4", "--trials", "1000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let e = &r["results"]["estimate"];
    assert_eq!(e["trials"], 1000);
    assert!(e["freq_1_and_2"].as_f64().unwrap() >= 0.5 - 3.0 * e["sigma_half"].as_f64().unwrap());
    assert_eq!(r["status"], "ok");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["cd", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["cd", "--x", "10a"]).status.code(), Some(2));
    let o = run(&["cd", "--n", "7"]);
    assert_eq!(o.status.code(), Some(3));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["status"], "cap_violation");
    assert_eq!(run(&["--program-len", "30", "cd"]).status.code(), Some(3));
    // the estimated path agrees on 238 of 246 outputs, short of 1
    let o = run(&["dist2set", "--min-agreement", "1.0"]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["status"], "check_failed");
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"command": "cd", "n": 3}"#).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, "not json").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn echoed_config_replays_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path(), "a.json");
    assert_eq!(run(&["nw-search", "--family", "cylinder", "--i", "3", "--k", "1", "--out", &out]).status.code(), Some(0));
    let first = std::fs::read_to_string(&out).unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, report(Path::new(&out))["config"].to_string()).unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap()]).status.code(), Some(0));
    let second = std::fs::read_to_string(&out).unwrap();
    let strip = |s: &str| s.lines().filter(|l| !l.starts_with("  \"timing\"")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&first), strip(&second));
    assert!(first.trim_end().ends_with('}'));
    let r = report(Path::new(&out));
    assert!(r["timing"]["elapsed_ms"].as_f64().is_some());
    assert!(r["results"]["circuit"].as_str().is_some());
}

#[test]
fn single_target_queries() {
    let o = run(&["cd", "--n", "3", "--set", "255"]);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["results"]["value"]["kind"], "finite");
    let o = run(&["cd", "--n", "2", "--set", "32"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["improve", "--x", "101", "--model", "21"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["results"]["found"], 1);
}
