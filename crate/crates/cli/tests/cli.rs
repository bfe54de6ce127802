use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use stackydeg_core::scenarios::{theta_example_2, two_genus2_bridge};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stackydeg"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_json(dir: &Path, name: &str, v: &impl serde::Serialize) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn scenario_alias_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let dot = dir.path().join("o.dot");
    let log = dir.path().join("log.json");
    let o = run(&[
        "scenario",
        "theta-example-2",
        "--k",
        "3",
        "--d",
        "2",
        "--out",
        out.to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
        "--log",
        log.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["limit_multidegree"]["deg"]["1"][0], "1/6");
    assert!(fs::read_to_string(&dot).unwrap().starts_with("graph"));
    let steps: Value = serde_json::from_str(&fs::read_to_string(&log).unwrap()).unwrap();
    assert_eq!(steps, v["log"]);
}

#[test]
fn degen_round_trips_dumped_input() {
    let dir = tempfile::tempdir().unwrap();
    let dumped = run(&["run", "theta-example-3", "--dump-input"]);
    assert!(dumped.status.success());
    let p = dir.path().join("ex3.json");
    fs::write(&p, &dumped.stdout).unwrap();
    let a = run(&["degen", p.to_str().unwrap()]);
    let b = run(&["run", "theta-example-3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["run", p.to_str().unwrap()]);
    assert_eq!(c.stdout, b.stdout);
}

#[test]
fn malformed_input_reports_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::to_value(two_genus2_bridge()).unwrap();
    v["nodes"][1]["stab"] = Value::String("two".into());
    let p = write_json(dir.path(), "bad.json", &v);
    let o = run(&["degen", &p]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("/nodes/1/stab"), "{err}");

    let mut v: Value = serde_json::to_value(two_genus2_bridge()).unwrap();
    v["gluing"]["1"]["entries"][0][0] = Value::String("t^+".into());
    let p = write_json(dir.path(), "bad2.json", &v);
    let o = run(&["degen", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/gluing/1/entries/0/0"));

    let o = run(&["degen", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["run", "no-such-scenario"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn degree_cap_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let m = serde_json::json!({"rows": 1, "cols": 1, "entries": [["t^10"]]});
    let p = write_json(dir.path(), "m.json", &m);
    assert!(run(&["snf", &p]).status.success());
    let o = bin().env("STACKYDEG_MAX_DEG", "9").args(["snf", &p]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/entries/0/0"));
}

#[test]
fn denominator_violation_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut input = theta_example_2(2, 2, 1);
    // denominator 3 is not allowed by stabilizers of order 2
    input.multidegree.deg.insert(0, vec![stackydeg_core::Rat::new(1, 3)]);
    let p = write_json(dir.path(), "den.json", &input);
    let o = run(&["degen", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(json(&o)["error"].is_string());
}

#[test]
fn engine_failure_exits_one_with_log() {
    let dir = tempfile::tempdir().unwrap();
    // torsion bridge whose two nodes have different orders cannot be contracted
    let input = serde_json::json!({
        "components": [{"id": 0, "genus": 1}, {"id": 1, "genus": 0}, {"id": 2, "genus": 1}],
        "nodes": [{"id": 0, "ends": [0, 1], "stab": 2}, {"id": 1, "ends": [1, 2], "stab": 3}],
        "multidegree": {"n_factors": 1, "deg": {"0": ["0"], "1": ["0"], "2": ["0"]}},
        "grading": {"d": [1]}
    });
    let p = write_json(dir.path(), "inc.json", &input);
    let log = dir.path().join("log.json");
    let o = run(&["degen", &p, "--log", log.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v["error"].as_str().unwrap().contains("orders 2 and 3"));
    let steps: Value = serde_json::from_str(&fs::read_to_string(&log).unwrap()).unwrap();
    assert_eq!(steps, v["log"]);
    assert!(!steps.as_array().unwrap().is_empty());

    let s = serde_json::json!({"rows": 2, "cols": 2, "entries": [["1", "t"], ["1", "t"]]});
    let p = write_json(dir.path(), "sing.json", &s);
    assert_eq!(run(&["snf", &p]).status.code(), Some(1));
}

#[test]
fn snf_blowup_resolve_commands() {
    let dir = tempfile::tempdir().unwrap();
    let m = serde_json::json!({"rows": 2, "cols": 2, "entries": [["t", "t"], ["t", "t^3"]]});
    let p = write_json(dir.path(), "m.json", &m);
    let v = json(&run(&["snf", &p]));
    assert_eq!(v["diag_valuations"], serde_json::json!([1, 1]));
    assert_eq!(v["shift"], 0);

    let v = json(&run(&["blowup", "--m", "2", "--d", "3"]));
    assert_eq!(v["result"]["exceptional_self_intersection"], "-1/6");
    assert_eq!(v["result"]["ideal_degree_on_exceptional"], "1/3");
    assert_eq!(run(&["blowup", "--m", "0", "--d", "3"]).status.code(), Some(2));

    let v = json(&run(&["resolve", "--a", "7"]));
    assert_eq!(v["resolution"]["total_exceptional"], 6);
    assert_eq!(v["resolution"]["iterations"], 3);
}

#[test]
fn batch_writes_one_artifact_pair_per_input() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_json(dir.path(), "bridge.json", &two_genus2_bridge());
    let b = write_json(dir.path(), "ex2.json", &theta_example_2(3, 3, 2));
    let out = dir.path().join("out");
    let o = run(&["batch", &a, &b, "--jobs", "2", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for stem in ["bridge", "ex2"] {
        assert!(out.join(format!("{stem}.json")).exists());
        assert!(out.join(format!("{stem}.dot")).exists());
    }
    let single = run(&["degen", &a]);
    assert_eq!(fs::read(out.join("bridge.json")).unwrap(), single.stdout);
}
