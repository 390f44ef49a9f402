use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rotset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotset"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn fixture_value(name: &str) -> Value {
    json(&rotset(&["fixture", name]))
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn star_and_bound_on_nonconvex_fixture() {
    let out = rotset(&["check", "genus2_nonconvex", "--star", "--bound"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["blocks"].as_array().unwrap().len(), 2);
    let report = &v["verification"];
    assert_eq!(report["star_shape"]["holds"], true);
    assert_eq!(report["bound"]["count"]["blocks"], 2);
    assert_eq!(report["bound"]["count"]["bound"], "128");
    assert!(report.get("interior").is_none());
    assert!(stderr(&out).contains("star-shape: true"));
}

#[test]
fn interior_not_applicable_without_full_block() {
    let out = rotset(&["check", "genus2_nonconvex", "--interior"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verification"]["interior"]["verdict"], "not-applicable");
}

#[test]
fn missing_file_is_invalid_input() {
    let out = rotset(&["compute", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "io");
}

#[test]
fn wrong_vector_length_is_located() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = fixture_value("genus2_nonconvex");
    m["pieces"][0]["graph"]["nodes"][1]["displacement"] = serde_json::json!(["1", "0", "0", "0", "0"]);
    let path = write_json(dir.path(), "bad.json", &m);
    let out = rotset(&["validate", &path]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["path"], "/pieces/0/graph/nodes/1/displacement");
}

#[test]
fn cyclic_relation_names_the_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = fixture_value("genus2_full");
    m["heteroclinic"]["relations"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!({"from": "L2", "to": "L1"}));
    let path = write_json(dir.path(), "cycle.json", &m);
    let out = rotset(&["compute", &path]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "invalid");
    let msg = v["error"]["violations"][0]["message"].as_str().unwrap();
    assert!(msg.contains("L1 -> L2 -> L1"), "{msg}");
}

#[test]
fn parse_error_has_a_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = fixture_value("genus2_full");
    m["pieces"][1]["graph"]["nodes"][0]["displacement"][2] = serde_json::json!(0.5);
    let path = write_json(dir.path(), "float.json", &m);
    let out = rotset(&["validate", &path]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "parse");
    assert_eq!(v["error"]["path"], "/pieces/1/graph/nodes/0/displacement/2");
}

#[test]
fn written_fixture_computes_like_the_named_one() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("blocks.json");
    let out = rotset(&["fixture", "genus2_blocks", "--write", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let result = dir.path().join("result.json");
    let csv = dir.path().join("blocks.csv");
    let out = rotset(&[
        "compute",
        model.to_str().unwrap(),
        "--out",
        result.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let from_file = std::fs::read_to_string(&result).unwrap();
    let by_name = rotset(&["compute", "genus2_blocks"]);
    assert_eq!(
        from_file.trim_end(),
        String::from_utf8(by_name.stdout).unwrap().trim_end()
    );
    let csv = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv.lines().count(), 12);
    assert!(csv.lines().all(|l| l.split(',').count() == 5), "{csv}");
}

#[test]
fn compute_is_byte_identical_across_runs_and_strategies() {
    let a = rotset(&["compute", "exp_family(2)"]);
    let b = rotset(&["compute", "exp_family(2)"]);
    let c = rotset(&["--sequential", "compute", "exp_family(2)"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(json(&a)["blocks"].as_array().unwrap().len(), 4);
}

#[test]
fn every_fixture_validates_and_passes_all_checks() {
    for name in [
        "genus2_nonconvex",
        "genus2_full",
        "genus2_blocks",
        "exp_family(1)",
        "exp_family(2)",
        "exp_family(3)",
    ] {
        let out = rotset(&["validate", name]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        assert_eq!(json(&out)["valid"], true);
        let out = rotset(&[
            "check",
            name,
            "--star",
            "--bound",
            "--subspace",
            "--interior",
            "--convex-density",
            "4",
        ]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        assert_eq!(json(&out)["verification"]["passed"], true);
    }
}

#[test]
fn failed_check_exits_one() {
    // A second curved piece on the ray through e3 that avoids the origin:
    // the segment from 0 to e3 leaves the union.
    let dir = tempfile::tempdir().unwrap();
    let mut m = fixture_value("genus2_nonconvex");
    m["pieces"][1]["graph"] = serde_json::json!({
        "nodes": [
            {"id": "a", "displacement": ["0", "0", "1", "0"]},
            {"id": "b", "displacement": ["0", "0", "2", "0"]}
        ],
        "edges": [["a", "a"], ["a", "b"], ["b", "a"], ["b", "b"]]
    });
    let path = write_json(dir.path(), "ray.json", &m);
    let out = rotset(&["check", &path, "--star"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["verification"]["star_shape"]["holds"], false);
    assert_eq!(v["verification"]["passed"], false);
}

#[test]
fn resource_caps_exit_three() {
    let out = rotset(&["--cycle-cap", "2", "validate", "genus2_full"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let out = rotset(&["--probe-cap", "3", "check", "genus2_nonconvex", "--convex-density", "4"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert_eq!(json(&out)["error"]["kind"], "resource");
}

#[test]
fn fixture_listing_and_unknown_names() {
    let out = rotset(&["list-fixtures"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out).as_array().unwrap().len(), 4);
    let out = rotset(&["fixture", "genus3_nothing"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "unknown_fixture");
}
