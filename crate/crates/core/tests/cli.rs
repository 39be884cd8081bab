use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn trianalytic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trianalytic")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const OMEGA_I: &str =
    r#"{"dim_r":4,"mode":"exact","terms":[{"idx":[0,1],"re":"1","im":"0"},{"idx":[2,3],"re":"1","im":"0"}]}"#;
const HOLOMORPHIC: &str = r#"{"dim_r":4,"mode":"exact","terms":[{"idx":[0,2],"re":"1","im":"0"},{"idx":[0,3],"re":"0","im":"1"},{"idx":[1,2],"re":"0","im":"1"},{"idx":[1,3],"re":"-1","im":"0"}]}"#;

#[test]
fn identities_exit_codes() {
    assert_eq!(trianalytic(&["identities", "--dim-r", "4"]).status.code(), Some(0));
    assert_eq!(trianalytic(&["identities", "--dim-r", "8"]).status.code(), Some(0));
    assert_eq!(trianalytic(&["identities", "--dim-r", "6"]).status.code(), Some(2));
    assert_eq!(trianalytic(&["identities", "--dim-r", "4", "--mode", "float"]).status.code(), Some(0));
    assert_eq!(trianalytic(&["--bogus"]).status.code(), Some(2));
}

#[test]
fn dimension_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_trianalytic"))
        .args(["identities", "--dim-r", "8"])
        .env("TRIANALYTIC_DIM_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hodge_and_classify() {
    let dir = tempfile::tempdir().unwrap();
    let wi = write(dir.path(), "wi.json", OMEGA_I);
    let omega = write(dir.path(), "omega.json", HOLOMORPHIC);
    let r = report(&trianalytic(&["hodge", &wi, "--structure", "1,0,0"]));
    assert_eq!(r["components"].as_array().unwrap().len(), 1);
    assert_eq!((r["components"][0]["p"].as_u64(), r["components"][0]["q"].as_u64()), (Some(1), Some(1)));
    let r = report(&trianalytic(&["hodge", &omega]));
    assert_eq!((r["components"][0]["p"].as_u64(), r["components"][0]["q"].as_u64()), (Some(2), Some(0)));
    let r = report(&trianalytic(&["classify", &wi]));
    assert_eq!(r["verdict"], "ANTIPODAL_PAIR");
    assert_eq!(r["direction"], serde_json::json!(["1", "0", "0"]));
    assert_eq!(report(&trianalytic(&["classify", &omega]))["verdict"], "EMPTY");
    let bad = write(dir.path(), "bad.json", "{\"dim_r\":4}");
    assert_eq!(trianalytic(&["classify", &bad]).status.code(), Some(2));
    assert_eq!(trianalytic(&["hodge", &wi, "--structure", "1,1,0"]).status.code(), Some(2));
    assert_eq!(trianalytic(&["classify", &wi, "--mode", "float"]).status.code(), Some(2));
}

#[test]
fn wirtinger_reports() {
    let dir = tempfile::tempdir().unwrap();
    let plane = write(dir.path(), "p.json", r#"{"dim_r":4,"basis":[["1","0","0","0"],["0","1","0","0"]]}"#);
    let r = report(&trianalytic(&["wirtinger", &plane]));
    assert_eq!((r["eta_squared"].as_str(), r["complex"].as_bool()), (Some("1"), Some(true)));
    assert_eq!(report(&trianalytic(&["wirtinger", &plane, "--structure", "0,1,0"]))["eta_squared"], "0");
    let odd = write(dir.path(), "o.json", r#"{"dim_r":4,"basis":[["1","0","0","0"]]}"#);
    assert_eq!(trianalytic(&["wirtinger", &odd]).status.code(), Some(2));
}

#[test]
fn torus_verify_and_scan() {
    let dir = tempfile::tempdir().unwrap();
    let line = write(
        dir.path(),
        "line.json",
        r#"{"dim_r":8,"basis":[[1,0,0,0,0,0,0,0],[0,1,0,0,0,0,0,0],[0,0,1,0,0,0,0,0],[0,0,0,1,0,0,0,0]]}"#,
    );
    let out = trianalytic(&["torus-verify", &line]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["subtori"][0]["dual_invariant"], true);
    assert_eq!(r["subtori"][0]["trianalytic"], true);
    let out = trianalytic(&["torus-verify", "--family", "exhaustive", "--dim-r", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["violations"], 0);
    let nonprimitive = write(dir.path(), "np.json", r#"{"dim_r":4,"basis":[[2,0,0,0],[0,1,0,0]]}"#);
    assert_eq!(trianalytic(&["torus-verify", &nonprimitive]).status.code(), Some(2));
    let out = trianalytic(&["scan", "--degree", "2", "--bound", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!((r["invariant"].as_u64(), r["violations"].as_u64()), (Some(27), Some(0)));
    assert_eq!(trianalytic(&["scan", "--degree", "4", "--bound", "1", "--dim-r", "8"]).status.code(), Some(2));
}

#[test]
fn isotypic_examples() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "one.json", r#"{"dim_r":4,"mode":"exact","terms":[{"idx":[],"re":"1","im":"0"}]}"#);
    let r = report(&trianalytic(&["isotypic", &one]));
    assert_eq!(r["constant"], "1");
    assert_eq!(r["alpha_o"]["terms"][0]["re"], "1");
    let mixed = write(
        dir.path(),
        "mixed.json",
        r#"{"dim_r":4,"mode":"exact","terms":[{"idx":[0,1],"re":"2","im":"0"},{"idx":[0,2],"re":"1","im":"0"},{"idx":[1,3],"re":"1","im":"0"}]}"#,
    );
    let r = report(&trianalytic(&["isotypic", &mixed]));
    let expected: Value = serde_json::from_str(OMEGA_I).unwrap();
    assert_eq!(r["alpha_o"]["terms"].as_array().unwrap().len(), 2);
    assert_eq!(r["alpha_o"]["terms"][0]["idx"], expected["terms"][0]["idx"]);
    assert_eq!(r["alpha_o"]["terms"][1]["idx"], expected["terms"][1]["idx"]);
}

#[test]
fn reports_are_byte_stable_and_honour_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["torus-verify", "--family", "random", "--count", "40", "--seed", "7", "--dim-r", "8"];
    let first = trianalytic(&args);
    let out = trianalytic(&[&args[..], &["--out", path.to_str().unwrap(), "--jobs", "2"]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), first.stdout);
    let other_seed =
        trianalytic(&["torus-verify", "--family", "random", "--count", "40", "--seed", "8", "--dim-r", "8"]);
    assert_ne!(other_seed.stdout, first.stdout);
}
