use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const EXAMPLE: &str = r#"{"family":"triad","x":4,"y":8,"z":7,"a":1,"b":1,"c":3,"a_prime":2,"b_prime":1,"c_prime":1,
"apex":{"u":9,"v":16},"f":6}"#;

fn triad(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_triad"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // The binary may exit on a bad flag before reading its input.
    if let Err(e) = child.stdin.take().unwrap().write_all(stdin.as_bytes()) {
        assert_eq!(e.kind(), std::io::ErrorKind::BrokenPipe);
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn counts_hexagons() {
    for (spec, want) in [
        (r#"{"family":"hexagon","x":1,"y":1,"z":1}"#, "2"),
        (r#"{"family":"hexagon","x":3,"y":3,"z":3}"#, "980"),
        (r#"[{"u":0,"v":0,"orientation":"up"}]"#, "0"),
    ] {
        let o = triad(&["count"], spec);
        assert!(o.status.success(), "{o:?}");
        assert_eq!(stdout(&o).trim(), want);
    }
}

#[test]
fn build_then_count_matches_library() {
    let spec = r#"{"family":"sphinx","d":1,"x":1,"y":1,"z":1,"a":1,"b":0,"c":1,"a_prime":1,"b_prime":0,"c_prime":1}"#;
    let built = triad(&["build"], spec);
    assert!(built.status.success());
    let v: Value = serde_json::from_str(&stdout(&built)).unwrap();
    assert_eq!(v["family"], "sphinx");
    assert_eq!(v["cells"].as_u64().unwrap() as usize, v["region"].as_array().unwrap().len());
    let counted = triad(&["count"], &stdout(&built));
    let fam: triad_core::FamilySpec = serde_json::from_str(spec).unwrap();
    let want = triad_core::count_tilings(&triad_core::build_family(&fam).unwrap()).unwrap();
    assert_eq!(stdout(&counted).trim(), want.to_string());
}

#[test]
fn build_reports_depths_and_constraint_errors() {
    let o = triad(&["build"], EXAMPLE);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["side_lengths"], serde_json::json!([9, 12, 12, 8, 13, 11]));
    assert_eq!(v["depths"]["s_depth"], 6);
    let bad = triad(&["build"], r#"{"family":"triad","x":1,"y":1,"z":1,"a_prime":2,"apex":{"u":1,"v":2},"f":1}"#);
    assert_eq!(bad.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_eq!(err["error"], "constraint");
    assert!(err["message"].as_str().unwrap().contains("a'+b'+c'"));
}

#[test]
fn squeeze_moves_and_full() {
    let stepwise = triad(&["squeeze", "--move", "top:out:2", "--move", "left:out:1", "--move", "right:out:1"], EXAMPLE);
    let full = triad(&["squeeze", "--full"], EXAMPLE);
    assert!(stepwise.status.success() && full.status.success());
    assert_eq!(stdout(&stepwise), stdout(&full));
    let v: Value = serde_json::from_str(&stdout(&full)).unwrap();
    assert_eq!(v["f"], 2);
    // The output feeds straight back in.
    let again = triad(&["squeeze", "--move", "top:in:1"], &stdout(&full));
    assert!(again.status.success());
    let too_far = triad(&["squeeze", "--move", "top:out:3"], EXAMPLE);
    assert_eq!(too_far.status.code(), Some(2));
    let bad_move = triad(&["squeeze", "--move", "top:sideways:1"], EXAMPLE);
    assert_eq!(bad_move.status.code(), Some(2));
}

#[test]
fn resource_limit_exit_code() {
    let o = triad(&["--max-cells", "10", "count"], EXAMPLE);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn formula_values() {
    let o = triad(&["formula"], r#"{"family":"hexagon","x":2,"y":2,"z":2}"#);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["target"], "count");
    assert_eq!(v[0]["value"], serde_json::json!({"num": "20", "den": "1"}));
    let domain = triad(&["formula"], r#"{"family":"snowman","x":4,"y":9,"a":2,"b":1,"c":1,"k":1}"#);
    assert_eq!(domain.status.code(), Some(2));
}

#[test]
fn verify_bundled_plans() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for plan in ["lemma21-small", "main-theorem-small"] {
        let o = triad(&["verify", plan, "--out", out], "");
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let jsonl = std::fs::read_to_string(dir.path().join("tileability_small.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 1024);
    let csv = std::fs::read_to_string(dir.path().join("tileability_small.csv")).unwrap();
    assert!(csv.starts_with("case_id,verdict,runtime_ms\n"));
    assert_eq!(csv.lines().count(), 1025);
}

#[test]
fn verify_plan_files_and_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(&plan, r#"{"name":"k","check":"kuo","samples":5,"seed":1}"#).unwrap();
    let run = |seed: &str| {
        let out = dir.path().join(seed);
        let o = triad(
            &["verify", plan.to_str().unwrap(), "--seed", seed, "--jobs", "2", "--out", out.to_str().unwrap()],
            "",
        );
        assert!(o.status.success());
        let text = std::fs::read_to_string(out.join("k.jsonl")).unwrap();
        text.lines()
            .map(|l| {
                let mut v: Value = serde_json::from_str(l).unwrap();
                v["runtime_ms"] = 0.into();
                v
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
    let missing = triad(&["verify", dir.path().join("nope.json").to_str().unwrap()], "");
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn config_file_sets_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"max_cells": 10}"#).unwrap();
    let o = triad(&["--config", cfg.to_str().unwrap(), "count"], EXAMPLE);
    assert_eq!(o.status.code(), Some(3));
    std::fs::write(&cfg, r#"{"max_cells": 0}"#).unwrap();
    assert_eq!(triad(&["--config", cfg.to_str().unwrap(), "count"], EXAMPLE).status.code(), Some(2));
}

#[test]
fn render_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for p in [&a, &b] {
        let o = triad(&["render", "--out", p.to_str().unwrap()], EXAMPLE);
        assert!(o.status.success());
    }
    let svg = std::fs::read_to_string(&a).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("<svg"));
    assert!(svg.contains(">A<"));
    assert_eq!(svg, std::fs::read_to_string(&b).unwrap());
    let o = triad(&["render", "--out", dir.path().join("no/such/dir.svg").to_str().unwrap()], EXAMPLE);
    assert_eq!(o.status.code(), Some(2));
}
