use std::path::{Path, PathBuf};
use std::process::Command;

use critfin_cli::{CliError, MapFile};
use critfin_core::dynamics::Endomorphism;
use critfin_core::Error;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn critfin(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_critfin")).args(args).output().expect("spawn critfin");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("bad JSON ({e}): {text}"))
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_nilpotent_map() {
    let r = critfin(&["analyze", path_str(&fixture("f.json")), "--order", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = json(&r.stdout);
    assert_eq!(rep["schema_version"], 1);
    assert_eq!(rep["verdicts"]["critically_finite_order_1"], true);
    assert_eq!(rep["verdicts"]["one_critically_finite"], false);
    let c = &rep["classification"];
    let mut crit = strings(&c["critical_set"]);
    crit.sort();
    assert_eq!(crit, vec!["t", "w", "z"]);
    assert_eq!(c["jacobian_degree"], 3);
    let om = &c["orders"][0]["omega"];
    assert_eq!(om["l"], 1);
    assert_eq!(om["e"].as_array().unwrap().len(), 4);
    assert_eq!(om["f"], om["e"]);
    let origin = rep["periodic"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["point"] == "[0:0:1]")
        .expect("[0:0:1] is fixed");
    assert_eq!(origin["classification"], "superattracting-nilpotent-nonzero");
    assert_eq!(origin["matrix"]["Exact"], serde_json::json!([["0", "-1"], ["0", "0"]]));
}

#[test]
fn power_map_second_order() {
    let r = critfin(&["analyze", path_str(&fixture("power.json")), "--order", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rep = json(&r.stdout);
    let o2 = &rep["classification"]["orders"][1];
    let vertices = vec!["[0:0:1]", "[0:1:0]", "[1:0:0]"];
    assert_eq!(strings(&o2["seeds"]), vertices);
    assert_eq!(strings(&o2["omega"]["f"]), vertices);
    assert_eq!(rep["verdicts"]["critically_finite_order_2"], true);
    assert_eq!(rep["verdicts"]["two_critically_finite"], false);
}

#[test]
fn echoed_map_reparses_to_the_input() {
    for name in ["f.json", "g3.json", "power.json", "quadratic_minus2.json", "lattes.json"] {
        let r = critfin(&["analyze", path_str(&fixture(name)), "--order", "1"]);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
        let echo = strings(&json(&r.stdout)["map"]["components"]);
        let refs: Vec<&str> = echo.iter().map(String::as_str).collect();
        let reparsed = Endomorphism::parse(&refs).unwrap();
        let input = MapFile::load(&fixture(name)).unwrap().endomorphism().unwrap();
        assert_eq!(reparsed.forms(), input.forms(), "{name}");
    }
}

#[test]
fn config_echo_tracks_every_knob() {
    let dir = tempfile::tempdir().unwrap();
    let defaults = json(&critfin(&["analyze", path_str(&fixture("power.json")), "--order", "1"]).stdout)["config"].clone();
    let keys: Vec<String> = defaults.as_object().unwrap().keys().cloned().collect();
    assert!(keys.len() >= 19);
    for key in keys {
        let old = &defaults[&key];
        let new = match old {
            Value::Number(n) if n.is_u64() => Value::from(n.as_u64().unwrap() + 1),
            Value::Number(n) => Value::from(n.as_f64().unwrap() * 0.5),
            other => panic!("unexpected config value {other}"),
        };
        let cfg = dir.path().join(format!("{key}.json"));
        std::fs::write(&cfg, serde_json::json!({ &key: new.clone() }).to_string()).unwrap();
        let r = critfin(&["analyze", path_str(&fixture("power.json")), "--order", "1", "--config", path_str(&cfg)]);
        assert_eq!(r.code, 0, "{key}: {}", r.stderr);
        let echoed = json(&r.stdout)["config"].clone();
        assert_eq!(echoed[&key], new, "{key} not echoed");
        for other in defaults.as_object().unwrap().keys().filter(|k| **k != key) {
            assert_eq!(echoed[other], defaults[other], "{other} changed while mutating {key}");
        }
    }
    let r = critfin(&["analyze", path_str(&fixture("power.json")), "--order", "1", "--seed", "7"]);
    assert_eq!(json(&r.stdout)["config"]["seed"], 7);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"no_such_knob": 1}"#).unwrap();
    let r = critfin(&["analyze", path_str(&fixture("power.json")), "--config", path_str(&cfg)]);
    assert_eq!(r.code, 2);
}

#[test]
fn malformed_maps_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax", r#"{"dimension": 2, "degree": 2, "components": ["z^2 +", "w^2", "t^2"]}"#),
        ("inhomogeneous", r#"{"dimension": 2, "degree": 2, "components": ["z^2 + w", "w^2", "t^2"]}"#),
        ("arity", r#"{"dimension": 2, "degree": 2, "components": ["z^2", "w^2"]}"#),
        ("degree", r#"{"dimension": 2, "degree": 3, "components": ["z^2", "w^2", "t^2"]}"#),
        ("not a morphism", r#"{"dimension": 2, "degree": 2, "components": ["z^2", "z*w", "z*t"]}"#),
        ("json", "not json"),
    ];
    for (name, text) in cases {
        let p = dir.path().join("map.json");
        std::fs::write(&p, text).unwrap();
        let r = critfin(&["analyze", path_str(&p)]);
        assert_eq!(r.code, 2, "{name}: {}", r.stderr);
        assert!(r.stderr.starts_with("critfin: "), "{name}");
    }
    assert_eq!(critfin(&["analyze", "/nonexistent/map.json"]).code, 2);
    let f = fixture("f.json");
    assert_eq!(critfin(&["certify-ramification", path_str(&f), "--point", "0,0,0"]).code, 2);
    assert_eq!(critfin(&["certify-ramification", path_str(&f), "--point", "1,2"]).code, 2);
    assert_eq!(critfin(&["render", path_str(&f), "--res", "0x4"]).code, 2);
}

#[test]
fn small_budget_exits_with_3_and_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let r = critfin(&["analyze", path_str(&fixture("f.json")), "--budget", "2", "--report", path_str(&out)]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    let rep = json(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rep["verdicts"]["budget_exhausted"], true);
    assert_eq!(rep["config"]["curve_node_budget"], 2);
    let diag = rep["classification"]["orders"][0]["diagnostics"][0].as_str().unwrap();
    assert!(diag.contains("not critically finite within budget"), "{diag}");
}

#[test]
fn error_kinds_map_to_documented_codes() {
    assert_eq!(CliError::from(Error::SolverShortfall("3 of 4 roots".into())).exit_code(), 4);
    assert_eq!(CliError::from(Error::BudgetExceeded("x".into())).exit_code(), 3);
    assert_eq!(CliError::from(Error::ZeroPolynomial).exit_code(), 2);
    assert_eq!(CliError::from(Error::Undecided("x".into())).exit_code(), 1);
    assert_eq!(CliError::Unwritable { path: "p".into(), msg: "m".into() }.exit_code(), 5);
}

#[test]
fn unwritable_outputs_exit_with_5() {
    let bad = "/nonexistent-dir/out";
    let f = path_str(&fixture("power.json")).to_string();
    assert_eq!(critfin(&["analyze", &f, "--order", "1", "--report", bad]).code, 5);
    assert_eq!(critfin(&["certify-ramification", &f, "--point", "1,1,1", "--depth", "1", "--out", bad]).code, 5);
    assert_eq!(critfin(&["render", &f, "--res", "2x2", "--out", bad]).code, 5);
}

#[test]
fn render_writes_ppm_and_legend() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("power.ppm");
    let r = critfin(&["render", path_str(&fixture("power.json")), "--res", "64x64", "--out", path_str(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let bytes = std::fs::read(&out).unwrap();
    let header = b"P6\n64 64\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len() - header.len(), 64 * 64 * 3);
    let summary = json(&r.stdout);
    assert_eq!(summary["pixels"], 4096);
    let legend = json(&std::fs::read_to_string(dir.path().join("power.legend.json")).unwrap());
    let colors: Vec<&Value> = legend["summary"]["legend"].as_array().unwrap().iter().map(|e| &e["color"]).collect();
    // every pixel color appears in the legend
    for px in bytes[header.len()..].chunks(3) {
        assert!(colors.iter().any(|c| *c == &serde_json::json!(px)), "color {px:?} missing from legend");
    }

    let one = dir.path().join("one.ppm");
    let r = critfin(&["render", path_str(&fixture("f.json")), "--res", "1x1", "--out", path_str(&one)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let bytes = std::fs::read(&one).unwrap();
    assert_eq!(bytes.len(), b"P6\n1 1\n255\n".len() + 3);
    assert_eq!(json(&r.stdout)["pixels"], 1);
}

#[test]
fn certify_examples() {
    let r = critfin(&["certify-ramification", path_str(&fixture("power.json")), "--point", "1,1,1", "--depth", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = json(&r.stdout);
    assert_eq!(c["verdict"]["kind"], "all-within-bound");
    assert_eq!(c["max_count"], 0);
    assert_eq!(c["leaves"], 64);
    assert_eq!(c["bound"], 2);

    let r = critfin(&["certify-ramification", path_str(&fixture("f.json")), "--point", "2,3,5", "--depth", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = json(&r.stdout);
    assert_eq!(c["verdict"]["kind"], "all-within-bound");
    assert_eq!(c["undecided_paths"].as_array().unwrap().len(), 0);

    let r = critfin(&["certify-ramification", path_str(&fixture("f.json")), "--point", "0,1,1", "--depth", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(json(&r.stdout)["verdict"]["kind"], "not-applicable");

    let r = critfin(&["certify-ramification", path_str(&fixture("quadratic_minus2.json")), "--point", "-1/2,1", "--depth", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = json(&r.stdout);
    assert_eq!(c["bound"], 2);
    assert_eq!(c["verdict"]["kind"], "all-within-bound");
}
