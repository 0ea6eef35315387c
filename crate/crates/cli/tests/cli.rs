use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str], file: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gerbex")).args(args).arg(fixture(file)).output().expect("runs")
}

fn json(args: &[&str], file: &str) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let out = run(&a, file);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{}: {}", e, String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn verdicts(v: &Value) -> Vec<(String, String)> {
    v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["problem"].as_str().unwrap().to_string(), r["verdict"].as_str().unwrap_or("").to_string()))
        .collect()
}

fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
    v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

#[test]
fn valid_fixtures_validate() {
    for f in
        ["pseudocircle.json", "split.json", "cocycle_obstructed.json", "chain_undefined.json", "heisenberg.json", "pseudosphere_layer.json"]
    {
        let (code, v) = json(&["validate"], f);
        assert_eq!(code, 0, "{}", f);
        assert_eq!(v["ok"], Value::Bool(true));
    }
}

#[test]
fn invalid_fixtures_name_their_witness() {
    let cases = [
        ("non_associative.json", "group `Bad`", "not associative"),
        ("non_normal.json", "normal subgroupoid `N`", "not normal"),
        ("not_a_stack.json", "stack condition of gerbe `Trivial`", "outside the prestack"),
    ];
    for (f, check, witness) in cases {
        let (code, v) = json(&["validate"], f);
        assert_eq!(code, 1, "{}", f);
        let c = v["checks"].as_array().unwrap().iter().find(|c| c["check"] == check).expect(check);
        assert_eq!(c["ok"], Value::Bool(false));
        assert!(c["witness"].as_str().unwrap().contains(witness), "{}", c);
    }
    let out = run(&["obstruct"], "non_associative.json");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("structural check"));
}

#[test]
fn pseudocircle_cohomology() {
    let (code, v) = json(&["cohomology"], "pseudocircle.json");
    assert_eq!(code, 0);
    let r = v["results"].as_array().unwrap();
    let factors = |name: &str| r.iter().find(|x| x["problem"] == name).unwrap()["invariant_factors"].clone();
    assert_eq!(factors("h1_z2"), serde_json::json!([2]));
    assert_eq!(factors("h1_z4"), serde_json::json!([4]));
    assert_eq!(factors("h0_z4"), serde_json::json!([4]));
    let s3 = r.iter().find(|x| x["problem"] == "h1_s3").unwrap();
    assert_eq!(s3["abelian"], Value::Bool(false));
}

#[test]
fn obstruct_verdicts_and_exit_codes() {
    let (code, v) = json(&["obstruct"], "pseudocircle.json");
    assert_eq!(code, 2);
    assert_eq!(verdicts(&v), pairs(&[("iso_trivial", "LIFTED"), ("iso_twisted", "OBSTRUCTED"), ("torsor_lifts", "LIFTED")]));
    let twisted = &v["results"][1];
    assert_eq!(twisted["class"]["trivial"], Value::Bool(false));

    let (code, v) = json(&["obstruct"], "split.json");
    assert_eq!(code, 0);
    assert!(verdicts(&v).iter().all(|(_, x)| x == "LIFTED"));

    let (code, v) = json(&["obstruct"], "cocycle_obstructed.json");
    assert_eq!(code, 2);
    assert_eq!(verdicts(&v), pairs(&[("twisted", "OBSTRUCTED"), ("untwisted", "LIFTED")]));

    let (code, v) = json(&["obstruct"], "chain_undefined.json");
    assert_eq!(code, 3);
    assert_eq!(verdicts(&v), pairs(&[("chain", "UNDEFINED")]));
    assert!(v["results"][0]["undefined_reason"].as_str().unwrap().contains("step lifts"));
}

#[test]
fn problem_filter() {
    let (code, v) = json(&["obstruct", "--problem", "iso_trivial"], "pseudocircle.json");
    assert_eq!(code, 0);
    assert_eq!(verdicts(&v), pairs(&[("iso_trivial", "LIFTED")]));
    let out = run(&["obstruct", "--problem", "nope"], "pseudocircle.json");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pronil_verdicts() {
    let (code, v) = json(&["pronil"], "heisenberg.json");
    assert_eq!(code, 0);
    assert_eq!(verdicts(&v), pairs(&[("acyclic", "ACYCLIC"), ("connect", "CONNECTED"), ("glue", "GLUED")]));

    let (code, v) = json(&["pronil"], "pseudosphere_layer.json");
    assert_eq!(code, 2);
    assert_eq!(verdicts(&v), pairs(&[("acyclic", "ACYCLIC"), ("glue", "LAYER_OBSTRUCTED")]));
    assert_eq!(v["results"][1]["layer"], serde_json::json!(0));

    let (code, v) = json(&["pronil"], "pseudocircle.json");
    assert_eq!(code, 2);
    assert_eq!(verdicts(&v), pairs(&[("acyclic", "NOT_ACYCLIC"), ("connect_twisted", "LAYER_OBSTRUCTED"), ("glue", "GLUED")]));

    let (code, v) = json(&["pronil", "--pmax", "1"], "heisenberg.json");
    assert_eq!(code, 0);
    assert!(v["results"].as_array().unwrap().iter().skip(1).all(|r| r["p_max"] == serde_json::json!(1)));
}

#[test]
fn seeded_runs_reach_the_same_verdicts() {
    let (_, canonical) = json(&["obstruct"], "pseudocircle.json");
    for seed in ["1", "7", "12345"] {
        let (code, v) = json(&["obstruct", "--seed", seed], "pseudocircle.json");
        assert_eq!(code, 2);
        assert_eq!(verdicts(&v), verdicts(&canonical));
    }
}

#[test]
fn parse_errors_carry_a_position() {
    let dir = std::env::temp_dir().join(format!("gerbex-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\n  \"schema\": 1,\n  \"space\": \n}").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gerbex")).arg("validate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{}", err);
    std::fs::remove_dir_all(&dir).unwrap();
}
