use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn walker(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walker")).args(args).output().expect("run walker")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn flat_metric_has_no_components() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "flat.json", r#"{"kind":"walker"}"#);
    let o = walker(&["curvature", "--metric", s(&m), "--at", "0.5,-1,2,3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("no nonzero components"));
}

#[test]
fn x1_squared_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "sq.json", r#"{"kind":"walker","fields":{"g34":"x1^2"}}"#);
    let o = walker(&["curvature", "--metric", s(&m), "--at", "0,0,0,0"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().filter(|l| l.starts_with("R_")).collect();
    assert_eq!(lines, ["R_1314 = 1"]);
    assert!(out.contains("scalar curvature = 0"));
}

#[test]
fn curvature_json_matches_text() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "sq.json", r#"{"kind":"walker","fields":{"g34":"x1^2*x3 + sin(x4)"}}"#);
    let at = "0.3,-0.7,1.1,0.9";
    let text = stdout(&walker(&["curvature", "--metric", s(&m), "--at", at]));
    let json: Value =
        serde_json::from_str(&stdout(&walker(&["curvature", "--metric", s(&m), "--at", at, "--format", "json"])))
            .unwrap();
    for c in json["components"].as_array().unwrap() {
        let v = c["value"].as_f64().unwrap();
        let rounded: f64 = format!("{v:.11e}").parse().unwrap();
        assert!(text.contains(&format!("{} = {rounded}", c["name"].as_str().unwrap())), "{text}");
    }
}

#[test]
fn singular_point_is_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "li.json", r#"{"kind":"walker","fields":{"g34":"x1*lin_inv(1, 1, 0)"}}"#);
    let o = walker(&["curvature", "--metric", s(&m), "--at", "0,0,-1,0"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("lin_inv"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind":"walker","fields":{"g34":"x1 +"}}"#);
    assert_eq!(code(&walker(&["curvature", "--metric", s(&bad), "--at", "0,0,0,0"])), 2);
    let cyclic = write(dir.path(), "cyc.json", r#"{"kind":"walker","fields":{"g34":"p"},"defs":{"p":"q","q":"p"}}"#);
    assert_eq!(code(&walker(&["report", "--metric", s(&cyclic)])), 2);
    assert_eq!(code(&walker(&["curvature", "--metric", s(&bad), "--at", "0,0,0"])), 2);
    assert_eq!(code(&walker(&["verify", "--suite", "bogus"])), 2);
    assert_eq!(code(&walker(&["curvature", "--metric", "/nonexistent.json", "--at", "0,0,0,0"])), 2);
}

#[test]
fn rational_family_report() {
    let dir = tempfile::tempdir().unwrap();
    // (a0, a3, a4) = (3, 1, 0): p = 0, q = -2 / (3 + x3)
    let m = write(
        dir.path(),
        "lemma.json",
        r#"{"kind":"walker","fields":{"g34":"x1*p + x2*q + s"},
            "defs":{"p":"0","q":"-2 * lin_inv(3, 1, 0)","s":"x3*x4^2"}}"#,
    );
    let o = walker(&["report", "--metric", s(&m), "--points", "5", "--seed", "3", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["points"].as_array().unwrap().len(), 5);
    for e in r["summary"].as_array().unwrap() {
        let name = e["property"].as_str().unwrap();
        let holds = e["verdict"] == "holds";
        let expected = [
            "ricci_flat",
            "einstein",
            "osserman_sampled",
            "jacobi_ricci",
            "curvature_ricci",
            "jacobi_jacobi",
            "curvature_jacobi",
            "curvature_curvature",
        ];
        if expected.contains(&name) {
            assert!(holds, "{name}: {e}");
        }
    }
}

#[test]
fn closed_one_form_report_text() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "c.json", r#"{"kind":"walker","fields":{"g34":"x1*x3 + x2*x4"}}"#);
    let o = walker(&["report", "--metric", s(&m)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let summary = out.split("worst over").nth(1).unwrap();
    let verdict = |name: &str| {
        let line = summary.lines().find(|l| l.trim_start().starts_with(&format!("{name} "))).unwrap();
        line.split_whitespace().last().unwrap().to_string()
    };
    for p in ["jacobi_ricci", "curvature_ricci", "curvature_curvature"] {
        assert_eq!(verdict(p), "holds", "{p}");
    }
    for p in ["jacobi_jacobi", "curvature_jacobi", "einstein"] {
        assert_eq!(verdict(p), "fails", "{p}");
    }
    assert!(out.contains("implications: consistent"));
}

#[test]
fn forced_threshold_inconsistency_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "t.json",
        r#"{"kind":"walker","fields":{"g34":"x1*x3 + x2*x4"},"thresholds":{"einstein":1e9}}"#,
    );
    let o = walker(&["report", "--metric", s(&m)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("einstein=holds, ricci_flat=fails"));
}

#[test]
fn report_json_is_key_sorted_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"kind":"walker","fields":{"g34":"x1*x3^2 + x2*x4 + x3*x4"},"seed":5}"#);
    let a = stdout(&walker(&["report", "--metric", s(&m), "--points", "4", "--format", "json"]));
    let b = stdout(&walker(&["report", "--metric", s(&m), "--points", "4", "--format", "json"]));
    assert_eq!(a, b);
    let keys: Vec<&str> =
        a.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn verify_suites() {
    for suite in ["oracle", "thm1.3"] {
        let o = walker(&["verify", "--suite", suite, "--format", "json"]);
        assert_eq!(code(&o), 0, "{suite}");
        let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(r["pass"], true);
        assert_eq!(r["calibration"]["self_dual_is_plus"], true);
    }
    let o = walker(&["verify", "--suite", "remarks"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("suite remarks seed 7: pass\n"));
}

#[test]
fn extend_connections() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.json");
    let read = |p: &Path| -> Value { serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap() };

    let flat = write(dir.path(), "flat.json", r#"{"kind":"affine_extension"}"#);
    assert_eq!(code(&walker(&["extend", "--affine", s(&flat), "--out", s(&out)])), 0);
    let w = read(&out);
    assert_eq!(w["kind"], "walker");
    let o = walker(&["curvature", "--metric", s(&out), "--at", "1,2,3,4"]);
    assert!(stdout(&o).contains("no nonzero components"));

    let lemma =
        write(dir.path(), "lemma.json", r#"{"kind":"affine_extension","fields":{"gamma34_3":"lin_inv(1, 1, 0)"}}"#);
    let o = walker(&["extend", "--affine", s(&lemma), "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(restricted)"));
    let w = read(&out);
    assert_eq!(w["fields"]["g44"], "0.0");

    let identity =
        write(dir.path(), "r1.json", r#"{"kind":"affine_extension","fields":{"gamma34_3":"x3","gamma44_4":"x3"}}"#);
    let o = walker(&["extend", "--affine", s(&identity), "--out", s(&out)]);
    assert!(stdout(&o).contains("not restricted"));
    assert_ne!(read(&out)["fields"]["g44"], "0.0");

    let walker_cfg = write(dir.path(), "wk.json", r#"{"kind":"walker"}"#);
    assert_eq!(code(&walker(&["extend", "--affine", s(&walker_cfg), "--out", s(&out)])), 2);
}
