use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};

fn absum(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_absum")).args(args).output().expect("binary runs");
    let code = out.status.code().unwrap_or(-1);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn classify_hex() {
    let dir = tempfile::tempdir().unwrap();
    let norm = write(dir.path(), "n.json", &json!({"kind": "pl", "knots": [["0", "1"], ["1/5", "4/5"], ["4/5", "4/5"], ["1", "1"]]}));
    let (code, r) = absum(&["classify", &norm]);
    assert_eq!(code, 0);
    assert_eq!(r["outputs"]["classification"]["variant"], "AOH");
    assert_eq!(r["outputs"]["star_constants"], json!(["1/4", "1/4"]));
}

#[test]
fn witness_on_c01() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "s.json", &json!({"model": "c01pl"}));
    let x = write(dir.path(), "x.json", &json!({"knots": [["0", "1"], ["1", "1"]]}));
    let slice = write(dir.path(), "f.json", &json!({"functional": {"masses": [["1/3", "1"]]}, "alpha": "1/10"}));
    let (code, r) = absum(&["witness", &space, &x, &slice, "--eps", "1/100"]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["verdicts"][0]["verdict"], "valid");
}

#[test]
fn demo_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = write(dir.path(), "c.json", &json!({"a": "3/2", "b": "3"}));
    let (code, _) = absum(&["demo", "prop45", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r["outputs"]["pair"], json!(["3/2", "3"]));
}

#[test]
fn not_applicable_is_an_error_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &json!({"norm": {"kind": "lp", "p": 2.0}}));
    let (code, r) = absum(&["demo", "thm41", &cfg]);
    assert_eq!(code, 1);
    assert_eq!(r["error"]["code"], "NotApplicable");
}

#[test]
fn falsify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = absum(&["demo", "prop44b", "--out", dir.path().join("d.json").to_str().unwrap()]);
    assert_eq!(code, 0, "{r}");
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("d.json")).unwrap()).unwrap();
    let mut cert = report["outputs"]["combined_certificate"].clone();
    let good = write(dir.path(), "good.json", &cert);
    let (code, r) = absum(&["falsify", &good, "--samples", "20000", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdicts"][0]["verdict"], "unfalsified");
    // the true supremum is about 0.894; claim 0.8
    cert["certificate"]["eps"] = json!("6/5");
    let bad = write(dir.path(), "bad.json", &cert);
    let (code, r) = absum(&["falsify", &bad, "--samples", "10000"]);
    assert_eq!(code, 2);
    assert_eq!(r["verdicts"][0]["verdict"], "violated");
}

#[test]
fn unreadable_input_exits_one() {
    let (code, _) = absum(&["classify", "/nonexistent/norm.json"]);
    assert_eq!(code, 1);
}
