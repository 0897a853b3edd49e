//! End-to-end checks of the command-line surface: output formats, the
//! export/import round trip, and exit codes.

use std::process::{Command, Output};

fn tubular(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubular"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn farey_mutate_prints_the_new_triple() {
    let out = tubular(&["farey", "mutate", "--triple", "0/1,1/1,1/0", "--at", "1/0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0/1,1/2,1/1");
}

#[test]
fn realize_base_emits_the_expected_slopes() {
    let out = tubular(&["realize-base", "--weights", "3,3,3"]);
    assert!(out.status.success());
    let config: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let classes = config["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 8);
    let ranks: Vec<i64> = classes
        .iter()
        .map(|c| c["rk"].as_i64().unwrap())
        .collect();
    assert_eq!(ranks.iter().filter(|&&r| r == 0).count(), 3);
}

#[test]
fn export_import_round_trip_is_identity() {
    let out = tubular(&["realize-base", "--weights", "4,4,2"]);
    let json = stdout(&out);
    let dir = std::env::temp_dir().join("tubular-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cfg.json");
    std::fs::write(&path, json.trim()).unwrap();

    let exported = tubular(&[
        "export",
        "--format",
        "json",
        "--config",
        path.to_str().unwrap(),
    ]);
    assert!(exported.status.success());
    assert_eq!(stdout(&exported).trim(), json.trim());

    let dot = tubular(&["export", "--format", "dot", "--config", path.to_str().unwrap()]);
    assert!(dot.status.success());
    assert!(stdout(&dot).starts_with("digraph"));
}

#[test]
fn mutate_twice_returns_to_the_start() {
    let out = tubular(&["canonical", "--weights", "2,2,2,2"]);
    let json = stdout(&out);
    let dir = std::env::temp_dir().join("tubular-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    std::fs::write(&a, json.trim()).unwrap();

    let once = tubular(&["mutate", "--config", a.to_str().unwrap(), "--vertex", "1"]);
    assert!(once.status.success());
    let b = dir.join("b.json");
    std::fs::write(&b, stdout(&once).trim()).unwrap();
    let twice = tubular(&["mutate", "--config", b.to_str().unwrap(), "--vertex", "1"]);
    assert_eq!(stdout(&twice).trim(), json.trim());
}

#[test]
fn growth_summary_matches_the_ball_size() {
    let out = tubular(&["growth", "--weights", "2,2,2,2", "--depth", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines.len(), 46);
    let summary: serde_json::Value = serde_json::from_str(lines[45]).unwrap();
    assert_eq!(summary["configurations"], 45);
    assert_eq!(summary["distinct"], 45);
    assert_eq!(summary["k"], 2);
}

#[test]
fn walk_rejects_backtracking_paths() {
    let ok = tubular(&["walk", "--weights", "6,3,2", "--path", "L,R,L"]);
    assert!(ok.status.success());
    // After an M step the fresh element sits at position L; L backtracks.
    let bad = tubular(&["walk", "--weights", "6,3,2", "--path", "M,L"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_golden_exits_zero() {
    let out = tubular(&["verify", "--suite", "golden"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().all(|l| l.contains("\"pass\"")));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(tubular(&["nonsense"]).status.code(), Some(2));
    assert_eq!(
        tubular(&["canonical", "--weights", "2,1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        tubular(&["growth", "--weights", "5,5,5", "--depth", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn seed_export_is_available() {
    let out = tubular(&["export", "--format", "json", "--seed", "E6_11"]);
    assert!(out.status.success());
    let m: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(m["n"], 8);
}
