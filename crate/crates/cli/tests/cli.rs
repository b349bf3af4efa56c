use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn s2det(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_s2det"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_out(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn identity2() -> Value {
    json!({"d": 2, "entries": [["1","1","0","0","1","0"], ["0","0","1","1","0","1"]]})
}

fn identity3() -> Value {
    json!({"d": 3, "entries": [
        ["1","1","0","1","0","0","1","0","1","0","0","0","0","0","0"],
        ["0","0","1","0","0","1","0","0","0","1","1","0","0","1","0"],
        ["0","0","0","0","1","0","0","1","0","0","0","1","1","0","1"]]})
}

fn generic2() -> Value {
    json!({"d": 2, "entries": [["2","3","5","7","11","13"], ["17","19","23","29","31","1/2"]]})
}

#[test]
fn enum_counts() {
    let out = s2det(&["enum", "--d", "2", "--count-only"]);
    assert!(out.status.success());
    assert_eq!(json_out(&out), json!({"count": 12}));

    let one = json_out(&s2det(&["enum", "--d", "1"]));
    assert_eq!(one, json!([{"d": 1, "colors": [1]}]));
}

#[test]
fn enum_out_file_lists_the_partitions() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("p2.json");
    let out = s2det(&["enum", "--d", "2", "--out", s(&path)]);
    assert_eq!(json_out(&out), json!({"count": 12}));
    let list: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(list.len(), 12);
    assert_eq!(list[0], json!({"d": 2, "colors": [1, 1, 2, 2, 1, 2]}));
}

#[test]
fn node_budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_s2det"))
        .args(["enum", "--d", "3", "--count-only"])
        .env("S2DET_NODE_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn identity_determinants() {
    let dir = TempDir::new().unwrap();
    let i2 = write(dir.path(), "i2.json", &identity2());
    let i3 = write(dir.path(), "i3.json", &identity3());
    assert_eq!(json_out(&s2det(&["det", s(&i2)])), json!({"det": "-1"}));
    assert_eq!(json_out(&s2det(&["det", s(&i3)])), json!({"det": "1"}));
    assert_eq!(
        json_out(&s2det(&["det", "--fast", s(&i3)])),
        json!({"det": "1"})
    );
}

#[test]
fn all_e1_matrix_has_zero_determinant() {
    let dir = TempDir::new().unwrap();
    let m = json!({"d": 2, "entries": [["1","1","1","1","1","1"], ["0","0","0","0","0","0"]]});
    let p = write(dir.path(), "e1.json", &m);
    assert_eq!(json_out(&s2det(&["det", s(&p)])), json!({"det": "0"}));
}

#[test]
fn det_with_saved_sign_table() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("signs2.json");
    let summary = json_out(&s2det(&["signs", "--d", "2", "--out", s(&table)]));
    assert_eq!(summary["count"], 12);
    assert_eq!(summary["consistent"], true);
    let a = write(dir.path(), "a.json", &generic2());
    let built = s2det(&["det", s(&a)]);
    let loaded = s2det(&["det", s(&a), "--signs", s(&table)]);
    assert!(built.status.success() && loaded.status.success());
    assert_eq!(built.stdout, loaded.stdout);

    let i3 = write(dir.path(), "i3.json", &identity3());
    assert_eq!(
        s2det(&["det", s(&i3), "--signs", s(&table)]).status.code(),
        Some(1)
    );
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.json", &generic2());
    let first = s2det(&["det", s(&a)]);
    let second = s2det(&["det", s(&a)]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(
        s2det(&["signs", "--d", "2"]).stdout,
        s2det(&["signs", "--d", "2"]).stdout
    );
}

#[test]
fn fast_path_rejects_non_triangular() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.json", &generic2());
    let out = s2det(&["det", "--fast", s(&a)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"d\": 2, \"entries\": [[\"1\"").unwrap();
    let out = s2det(&["det", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let wrong_shape = write(
        dir.path(),
        "w.json",
        &json!({"d": 2, "entries": [["1","2"]]}),
    );
    assert_eq!(s2det(&["det", s(&wrong_shape)]).status.code(), Some(2));
    let not_rational = write(dir.path(), "nr.json", &json!({"d": 1, "entries": [["x"]]}));
    assert_eq!(s2det(&["diag", s(&not_rational)]).status.code(), Some(2));
    assert_eq!(
        s2det(&["det", "/nonexistent/m.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_guards_and_passes() {
    let out = s2det(&["verify", "--d", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(s2det(&["verify", "--d", "4"]).status.code(), Some(1));

    let out = s2det(&["verify", "--d", "2", "--trials", "20"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json_out(&out);
    assert_eq!(report["d"], 2);
    assert_eq!(report["table"]["size"], 12);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn diag_and_check() {
    let dir = TempDir::new().unwrap();
    let i2 = write(dir.path(), "i2.json", &identity2());
    let d = json_out(&s2det(&["diag", s(&i2)]));
    assert_eq!(d["product"], "1");
    assert_eq!(d["set"], json!(["1"]));
    assert_eq!(
        d["entries"][2],
        json!({"edge": "(1,4)", "row": 2, "value": "1"})
    );

    assert_eq!(
        json_out(&s2det(&["check", s(&i2)])),
        json!({"upper": true, "lower": true})
    );
    let a = write(dir.path(), "a.json", &generic2());
    let out = s2det(&["check", "--upper", s(&a)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_out(&out), json!({"upper": false, "lower": false}));
}

#[test]
fn lim_lu_and_legs_round_trip() {
    let dir = TempDir::new().unwrap();
    let i2 = write(dir.path(), "i2.json", &identity2());
    let a = write(dir.path(), "a.json", &generic2());
    let prod = json_out(&s2det(&["lim", s(&i2), s(&a)]));
    assert_eq!(prod, generic2());

    let lu = json_out(&s2det(&["lu", s(&a)]));
    let l = write(dir.path(), "l.json", &lu["L"]);
    let u = write(dir.path(), "u.json", &lu["U"]);
    assert_eq!(json_out(&s2det(&["lim", s(&l), s(&u)])), generic2());
    assert_eq!(lu["L"]["entries"][1][0], "17/2");

    let legs = s2det(&["legs", s(&a)]);
    let dec = json_out(&legs);
    assert_eq!(dec["C"]["entries"], json!([["2", "13"], ["17", "1/2"]]));
    let dec_path = dir.path().join("legs.json");
    std::fs::write(&dec_path, &legs.stdout).unwrap();
    assert_eq!(
        json_out(&s2det(&["legs", "--assemble", s(&dec_path)])),
        generic2()
    );

    let singular = write(
        dir.path(),
        "s.json",
        &json!({"d": 2, "entries": [["0","1","1","1","1","1"], ["1","1","1","1","1","1"]]}),
    );
    assert_eq!(s2det(&["lu", s(&singular)]).status.code(), Some(1));
}

#[test]
fn solve_back_substitution() {
    let dir = TempDir::new().unwrap();
    let i2 = write(dir.path(), "i2.json", &identity2());
    let out = json_out(&s2det(&["solve", s(&i2), "--rhs", "1,-2/3"]));
    assert_eq!(
        out["centers"][1],
        json!({
            "variable": "(3,4)",
            "constant": "-2/3",
            "terms": [
                {"variable": "(1,4)", "coefficient": "-1"},
                {"variable": "(2,3)", "coefficient": "-1"}
            ]
        })
    );
    assert_eq!(
        s2det(&["solve", s(&i2), "--rhs", "1,abc"]).status.code(),
        Some(2)
    );
    assert_eq!(
        s2det(&["solve", s(&i2), "--rhs", "1"]).status.code(),
        Some(1)
    );
    let a = write(dir.path(), "a.json", &generic2());
    assert_eq!(
        s2det(&["solve", s(&a), "--rhs", "1,2"]).status.code(),
        Some(1)
    );
}
