use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn dioph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dioph")).args(args).output().expect("binary runs")
}

fn dioph_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dioph"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn eds_profile_of_two() {
    let out = dioph(&["eds", "profile", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], "dioph-report/1");
    assert_eq!(r["command"], serde_json::json!(["eds", "profile", "--n", "2"]));
    assert_eq!(r["results"]["d_n"], "25");
    assert_eq!(r["results"]["support"], serde_json::json!([5]));
    assert_eq!(r["status"], "ok");
    assert!(r["timing"]["total"].is_number());
}

#[test]
fn formula_from_stdin() {
    let out = dioph_stdin(&["zstruct", "eval", "--formula", "-"], "B(3)\n");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["value"], "true");
    let out = dioph_stdin(&["zstruct", "eval", "--formula", "-", "--var", "x=18"], "B(x)");
    assert_eq!(report(&out)["results"]["value"], "unknown");
    // Unbound variable and syntax errors are usage errors.
    assert_eq!(dioph_stdin(&["zstruct", "eval", "--formula", "-"], "B(x)").status.code(), Some(2));
    assert_eq!(dioph_stdin(&["zstruct", "eval", "--formula", "-"], "x ~ 1").status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dioph(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dioph(&["eds", "profile"]).status.code(), Some(2));
    assert_eq!(dioph(&["eds", "apparition", "--p", "4"]).status.code(), Some(2));
    assert_eq!(dioph(&["eds", "apparition", "--p", "3"]).status.code(), Some(2));
    assert_eq!(dioph(&["verify-all", "--only", "no-such-check"]).status.code(), Some(2));
    assert_eq!(dioph(&["curve", "info", "--workers", "0"]).status.code(), Some(2));
    assert_eq!(dioph(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.conf", "workers = many\n");
    assert_eq!(dioph(&["--config", &bad, "curve", "info"]).status.code(), Some(2));
    let good = write(dir.path(), "good.conf", "# test\nformat = text\nseed = 7\n");
    let out = dioph(&["--config", &good, "cyclo", "find", "--p", "3", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("results.conductor: 31\n"), "{text}");
}

#[test]
fn corrupted_fixture_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "off.fixture", "a = 0\nb = -2\nx = 3\ny = 6\nr = 2\n");
    let conf = write(dir.path(), "off.conf", "fixture = off.fixture\n");
    let out = dioph(&["--config", &conf, "verify-all"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["status"], "failed");
    assert!(r["counterexample"].as_str().unwrap().contains("not on the curve"));
    // Commands without a curve still run.
    assert_eq!(dioph(&["--config", &conf, "cyclo", "find", "--p", "3", "--q", "7"]).status.code(), Some(0));
}

#[test]
fn other_fixture_changes_constants() {
    // y^2 = x^3 + 17 through (-2, 3): still a valid fixture, but not the one
    // the constants check describes.
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "e17.fixture", "a = 0\nb = 17\nx = -2\ny = 3\nr = 2\n");
    let conf = write(dir.path(), "e17.conf", "fixture = e17.fixture\n");
    let out = dioph(&["--config", &conf, "verify-all", "--only", "fixture-constants"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["results"]["checks"][0]["passed"], false);
    assert!(r["counterexample"].as_str().unwrap().starts_with("fixture-constants: "));
}

#[test]
fn verify_all_is_deterministic_and_timed() {
    let args = ["verify-all", "--only", "2,4,5,9"];
    let a = dioph(&args);
    let b = dioph(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!(a.status.code(), Some(0));
    let (ra, rb) = (report(&a), report(&b));
    for name in ["fixture-constants", "support-intersections", "valuation-growth", "x-difference"] {
        assert!(ra["timing"][name].is_number(), "{name}");
    }
    assert_eq!(ra["results"]["passed"], 4);
    assert_eq!(ra["config_hash"], rb["config_hash"]);
    // The command echo differs by the worker flag only.
    let strip = |v: &Value| {
        let mut v = without_timing(v.clone());
        v.as_object_mut().unwrap().remove("command");
        v
    };
    assert_eq!(strip(&ra), strip(&rb));
    let c = dioph(&args);
    assert_eq!(without_timing(report(&c)), without_timing(ra));
}

#[test]
fn seed_enters_the_hash() {
    let a = report(&dioph(&["curve", "info"]));
    let b = report(&dioph(&["curve", "info", "--seed", "1"]));
    assert_ne!(a["config_hash"], b["config_hash"]);
    assert_eq!(a["results"], b["results"]);
}

#[test]
fn sequence_certificates_replay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seq.json");
    let p = path.to_str().unwrap();
    let out = dioph(&["seq", "build", "--variant", "discrete", "--count", "2", "--output", p]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["results"]["ells"], serde_json::json!([17, 19]));
    assert_eq!(r["certificates"][0]["conditions"].as_array().unwrap().len(), 8);
    assert_eq!(dioph(&["seq", "replay", "--report", p]).status.code(), Some(0));

    // A stored status that re-evaluation contradicts.
    let tampered = std::fs::read_to_string(&path).unwrap().replacen("\"passed\"", "\"failed\"", 1);
    let t = write(dir.path(), "tampered.json", &tampered);
    let out = dioph(&["seq", "replay", "--report", &t]);
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out)["counterexample"].as_str().unwrap().starts_with("term 1"));

    // Replaying under another configuration is refused.
    assert_eq!(dioph(&["seq", "replay", "--report", p, "--seed", "3"]).status.code(), Some(1));
}

#[test]
fn oracle_and_points() {
    let r = report(&dioph(&["seq", "oracle", "--prime", "5"]));
    assert_eq!((r["results"]["t1"].as_str(), r["results"]["t2"].as_str()), (Some("out"), Some("in")));
    let out = dioph(&["seq", "points", "--bound", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let integral: Vec<u64> = r["results"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["status"] == "integral")
        .map(|p| p["n"].as_u64().unwrap())
        .collect();
    assert_eq!(integral, [1, 17, 19, 31]);
}

#[test]
fn model_commands() {
    let r = report(&dioph(&["model", "build", "--count", "2"]));
    assert_eq!(r["results"]["params"]["M"], 6468);
    assert_eq!(r["results"]["terms"][0]["ell"], 135_829);
    for op in ["add", "b", "decode"] {
        let out = dioph(&["model", "verify", "--op", op, "--count", "3"]);
        assert_eq!(out.status.code(), Some(0), "{op}");
    }
    assert_eq!(dioph(&["model", "verify", "--op", "mul"]).status.code(), Some(2));
}

#[test]
fn cyclo_and_zstruct_commands() {
    let r = report(&dioph(&["cyclo", "density", "--specs", "3,5", "--X", "100000"]));
    let d = r["results"]["empirical"].as_f64().unwrap();
    assert!((d - 8.0 / 15.0).abs() < 0.02, "{d}");
    let r = report(&dioph(&["cyclo", "valuation", "--d", "-1", "--u", "50", "--v", "-25", "--p", "5"]));
    assert_eq!(r["results"]["equal"], true);
    assert_eq!(r["results"]["split"], true);
    assert_eq!(dioph(&["cyclo", "valuation", "--d", "4", "--u", "1", "--v", "1", "--p", "5"]).status.code(), Some(2));
    let r = report(&dioph(&["zstruct", "mult", "--u", "42", "--v", "6", "--w", "7"]));
    assert_eq!(r["results"]["mult_defined"], true);
    let r = report(&dioph(&["zstruct", "mult", "--u", "41", "--v", "6", "--w", "7"]));
    assert_eq!(r["results"]["mult_defined"], false);
    let r = report(&dioph(&["zstruct", "scan", "--bound", "100000"]));
    assert!(r["results"]["pairs"].is_array());
}

#[test]
fn curve_commands() {
    let r = report(&dioph(&["curve", "count", "--p", "11"]));
    assert_eq!(r["results"]["count"], 12);
    let r = report(&dioph(&["curve", "mul", "--n", "-1"]));
    assert_eq!(r["results"]["point"]["y"], "-5");
    assert_eq!(dioph(&["curve", "mul", "--n", "100000"]).status.code(), Some(1));
}
