use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn dpo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpo")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn fixture(dir: &Path, name: &str) -> PathBuf {
    let o = dpo(&["fixture", name]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    write(dir, &format!("{name}.json"), &String::from_utf8(o.stdout).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn coffee_apply_produces_a_verified_step() {
    let dir = TempDir::new().unwrap();
    let sys = fixture(dir.path(), "coffee-system");
    let g0 = fixture(dir.path(), "coffee-g0");
    let o = dpo(&["apply", "--system", s(&sys), "--graph", s(&g0), "--rule", "rho_w"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["steps"].as_array().unwrap().len(), 1);
    assert_eq!(v["steps"][0]["rule"], "rho_w");
}

#[test]
fn dangling_match_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let empty = json!({"carriers": {"E": [], "V": []}});
    let node = json!({"carriers": {"E": [], "V": ["1"]}});
    let sys = json!({"schema": "graph", "rules": [
        {"name": "kill", "K": empty, "L": node, "R": empty, "l": {"E": {}, "V": {}}, "r": {"E": {}, "V": {}}}
    ]});
    let host = json!({"schema": "graph", "carriers": {"E": ["x"], "V": ["a", "b"]}, "action": {"s": {"x": "a"}, "t": {"x": "b"}}});
    let sys = write(dir.path(), "sys.json", &sys.to_string());
    let host = write(dir.path(), "host.json", &host.to_string());
    let o = dpo(&["apply", "--system", s(&sys), "--graph", s(&host), "--rule", "kill"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("DanglingViolation"), "{}", stderr(&o));
}

#[test]
fn identity_rule_round_trips_the_host() {
    let dir = TempDir::new().unwrap();
    let k = json!({"carriers": {"E": [], "V": ["1"]}});
    let id = json!({"E": {}, "V": {"1": "1"}});
    let sys = json!({"schema": "graph", "rules": [{"name": "id", "K": k, "L": k, "R": k, "l": id, "r": id}]});
    let host = json!({"schema": "graph", "carriers": {"E": ["x"], "V": ["a"]}, "action": {"s": {"x": "a"}, "t": {"x": "a"}}});
    let sys = write(dir.path(), "sys.json", &sys.to_string());
    let host = write(dir.path(), "host.json", &host.to_string());
    let o = dpo(&["apply", "--system", s(&sys), "--graph", s(&host), "--rule", "id"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["steps"][0]["H"]["carriers"], v["start"]["carriers"]);
}

#[test]
fn independence_counts() {
    let dir = TempDir::new().unwrap();
    let e = fixture(dir.path(), "der-e");
    let o = dpo(&["analyze", "independence", "--derivation", s(&e)]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["positions"][1]["count"], 2);

    let fp = fixture(dir.path(), "der-f-prime");
    let o = dpo(&["analyze", "independence", "--derivation", s(&fp)]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["positions"][0]["count"], 0);
}

#[test]
fn switch_of_der_d_is_der_e() {
    let dir = TempDir::new().unwrap();
    let d = fixture(dir.path(), "der-d");
    let e = fixture(dir.path(), "der-e");
    let o = dpo(&["analyze", "switch", "--derivation", s(&d), "--position", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let switched = write(dir.path(), "switched.json", &String::from_utf8(o.stdout).unwrap());
    let o = dpo(&["analyze", "abstraction", "--derivation", s(&switched), "--target", s(&e)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = dpo(&["analyze", "abstraction", "--derivation", s(&d), "--target", s(&e)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn exit_codes_by_class() {
    let dir = TempDir::new().unwrap();
    let junk = write(dir.path(), "junk.json", "{ not json");
    assert_eq!(code(&dpo(&["analyze", "independence", "--derivation", s(&junk)])), 1);
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&dpo(&["analyze", "independence", "--derivation", s(&missing)])), 1);

    let poset = fixture(dir.path(), "poset");
    assert_eq!(code(&dpo(&["analyze", "switch", "--derivation", s(&poset), "--position", "0"])), 2);
    assert_eq!(code(&dpo(&["analyze", "colimit", "--derivation", s(&poset)])), 2);
    assert_eq!(code(&dpo(&["analyze", "strong", "--derivation", s(&poset), "--position", "0"])), 3);

    let e = fixture(dir.path(), "der-e");
    assert_eq!(code(&dpo(&["analyze", "switch", "--derivation", s(&e), "--position", "1"])), 2);
    assert_eq!(code(&dpo(&["analyze", "well-switching", "--derivation", s(&e)])), 3);
    let coffee = fixture(dir.path(), "coffee");
    assert_eq!(code(&dpo(&["analyze", "well-switching", "--derivation", s(&coffee)])), 0);
}

#[test]
fn canonical_sequence_positions() {
    let dir = TempDir::new().unwrap();
    let f2 = fixture(dir.path(), "der-f-second");
    let fp = fixture(dir.path(), "der-f-prime");
    let o = dpo(&["analyze", "canonical", "--derivation", s(&f2), "--target", s(&fp)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["positions"], json!([1, 0, 1]));
    assert_eq!(v["consists_of_inversions"], true);
}

#[test]
fn render_round_trips_and_draws() {
    let dir = TempDir::new().unwrap();
    let d = fixture(dir.path(), "der-d");
    let o = dpo(&["render", "--derivation", s(&d), "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(o.stdout, std::fs::read(&d).unwrap());
    let o = dpo(&["render", "--derivation", s(&d), "--format", "dot"]);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("digraph"));
}
