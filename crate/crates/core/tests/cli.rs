use std::path::PathBuf;

use chancalc::cli::run;
use chancalc::netmodel::{child, parse_network};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = vec![];
    let mut err = vec![];
    let argv = std::iter::once("chancalc").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn child_path() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models/child.json").display().to_string()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("chancalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn child_table() {
    let (code, out, _) = call(&["infer", "--model", &child_path(), "--evidence", "HD,CO", "--target", "LB", "--format", "table"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("eq,nr") && lines[1].contains("0.3561") && lines[1].contains("0.4966"));
    assert!(lines[6].starts_with("~eq,hi") && lines[6].contains("0.06306"));
}

#[test]
fn counterfactual_json() {
    let (code, out, _) = call(&["counterfactual", "--example", "medical", "--force", "X=1", "--observe", "X,Y", "--target", "Y'"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"]["0,0"]["1"], "1/46");
    assert_eq!(v["rows"]["0,1"]["1"], "49/454");
    assert_eq!(v["rows"]["1,1"]["1"], "1");
}

#[test]
fn do_commands() {
    let (code, out, _) = call(&["do", "--example", "medical", "--cause", "X", "--effect", "Y"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.trim(),
        r#"{"inputs":["X"],"outputs":["Y"],"rows":{"0":{"0":"3/5","1":"2/5"},"1":{"0":"3/4","1":"1/4"}}}"#
    );
    let (code, out, _) = call(&["do", "--example", "smoking_joint", "--format", "table"]);
    assert_eq!(code, 0);
    assert!(out.contains("0.5423") && out.contains("0.2535"));
}

#[test]
fn validation_failure_exits_one() {
    let bad = scratch(
        "bad.json",
        r#"{"spaces":{"B":["0","1"]},"nodes":[{"name":"Coin","space":"B","cpt":{"":{"0":1,"1":1}}}]}"#,
    );
    let (code, out, err) = call(&["validate", &bad]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(v["error"]["kind"], "validation");
    assert!(v["error"]["message"].as_str().unwrap().contains("Coin"));
    let (code, out, _) = call(&["validate", &child_path()]);
    assert_eq!(code, 0);
    assert!(out.contains("\"valid\":true"));
}

#[test]
fn inference_failure_exits_two() {
    let (code, _, err) = call(&["do", "--example", "medical", "--cause", "X", "--effect", "X"]);
    assert_eq!(code, 1, "{err}");
    let (code, _, err) = call(&["infer", "--example", "child", "--evidence", "BA", "--target", "HD", "--intervention", "/nonexistent.json"]);
    assert_eq!(code, 1, "{err}");
    let (code, _, err) = call(&["coord", "--location", "a=1/2,b=1/2", "--agent", "bob", "--depth", "100"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn examples_round_trip() {
    let (code, out, _) = call(&["examples"]);
    assert_eq!(code, 0);
    assert!(out.contains("fault_tree"));
    let (code, out, _) = call(&["examples", "--name", "child"]);
    assert_eq!(code, 0);
    assert_eq!(parse_network(&out).unwrap(), child());
    let (code, out, _) = call(&["examples", "--name", "smoking_joint"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["joint"]["rows"][""]["s,t,c"], "1/5");
}

#[test]
fn output_is_stable() {
    let args = ["joint", "--example", "fault_tree", "--keep", "w5,w2"];
    assert_eq!(call(&args), call(&args));
}

#[test]
fn interventions_and_soft_evidence() {
    let iv = scratch("iv.json", r#"{"node":"X","policy":"open_input"}"#);
    let (code, out, err) = call(&["joint", "--example", "medical", "--keep", "Y", "--intervention", &iv]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"]["1"]["1"], "1/4");
    let soft = scratch("soft.json", r#"{"0,1": "1/2", "0,0": "1/2"}"#);
    let (code, out, err) = call(&["infer", "--example", "medical", "--evidence", "Ur,Z", "--target", "Y", "--soft", &soft]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["lost_mass"], "1/2");
}

#[test]
fn impossible_evidence_is_flagged() {
    let (code, out, _) = call(&["infer", "--example", "medical", "--evidence", "Ur,Z", "--target", "Y"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["impossible"], serde_json::json!(["0,1"]));
}

#[test]
fn usage_errors() {
    let (code, _, err) = call(&["infer", "--example", "child"]);
    assert_eq!(code, 1);
    assert!(err.contains("--target"));
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("counterfactual"));
}
