use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_isoflag"));
    c.env_remove("ISOFLAG_JOBS");
    c
}

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), json(&out))
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or(Value::Null)
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decide_exit_codes() {
    let (code, v) = run(&["decide", path_str(&sample("q2_spanning.instance.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "Stable");

    let (code, v) = run(&["decide", path_str(&sample("q2_isotropic_span.instance.json"))]);
    assert_eq!(code, 2);
    assert_eq!(v["certificate"]["kind"], "IsotropicSpan");
    assert_eq!(v["certificate"]["subspace"]["basis"], serde_json::json!([["1", "0"]]));

    let (code, v) = run(&["decide", path_str(&sample("q4_coisotropic.instance.json")), "--seed", "5"]);
    assert_eq!(code, 2);
    assert_eq!(v["certificate"]["pardeg"], "1/4");
    assert_eq!(v["moved_copy"]["agrees"], true);
}

#[test]
fn hm_prints_summands() {
    let (code, v) = run(&[
        "hm",
        path_str(&sample("q4_coisotropic.instance.json")),
        "--oneps",
        path_str(&sample("q4_shape2.oneps.json")),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["total"], -32);
    assert_eq!(v["base"], 0);
    assert_eq!(v["N"], 32);
    let sum: i64 = v["summands"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["xi_term"].as_i64().unwrap() + s["zeta_term"].as_i64().unwrap())
        .sum();
    assert_eq!(sum, -32);
}

#[test]
fn data_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(sample("q2_spanning.instance.json")).unwrap();
    let bad = dir.path().join("bad.instance.json");
    std::fs::write(&bad, text.replacen("1/8", "1/0", 1)).unwrap();
    let (code, v) = run(&["validate", path_str(&bad)]);
    assert_eq!(code, 65);
    assert_eq!(v["error"]["pointer"], "/weight/alpha/0");

    let (code, _) = run(&["validate", "/nonexistent/file.json"]);
    assert_eq!(code, 65);
    assert_eq!(run(&["frobnicate"]).0, 64);
    assert_eq!(run(&["decide"]).0, 64);
    assert_eq!(run(&["crosscheck", "x", "--bound", "many"]).0, 64);
}

#[test]
fn validate_and_regions() {
    let (code, v) = run(&["validate", path_str(&sample("q4_coisotropic.instance.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["valid"], true);
    assert_eq!(v["q"], 4);

    let (code, v) = run(&["regions", path_str(&sample("q2_spanning.instance.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["degree_interval"]["integer"], -1);
    assert_eq!(v["toledo"], "-1/2");
    assert_eq!(v["compactness"]["eta_forced_zero"], true);
}

#[test]
fn gen_is_reproducible_and_decidable() {
    let a = bin().args(["gen", "--q", "3", "--s", "5", "--seed", "11"]).output().unwrap();
    let b = bin().args(["gen", "--q", "3", "--s", "5", "--seed", "11"]).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("g.instance.json");
    let out = bin().args(["gen", "--q", "3", "--s", "5", "--seed", "3", "--stable"]).output().unwrap();
    std::fs::write(&f, &out.stdout).unwrap();
    let (code, v) = run(&["decide", path_str(&f)]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("Stable")));
    assert_eq!(run(&["gen", "--q", "3", "--s", "4", "--stable"]).0, 65);
}

#[test]
fn batch_of_generated_instances() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..100u64 {
        let q = if seed % 2 == 0 { "2" } else { "3" };
        let s = (4 + seed % 3).to_string();
        let out = bin()
            .args(["gen", "--q", q, "--s", &s, "--seed", &seed.to_string()])
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::write(dir.path().join(format!("r{seed:03}.instance.json")), out.stdout).unwrap();
    }
    let csv = dir.path().join("report.csv");
    let (code, v) = run(&["batch", path_str(dir.path()), "--jobs", "4", "--csv", path_str(&csv)]);
    assert_eq!(code, 0);
    assert_eq!(v["instances"], 100);
    assert_eq!(v["inconsistencies"], 0);
    let counted: u64 = v["counts"].as_object().unwrap().values().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(counted, 100);
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 101);

    let out = bin()
        .env("ISOFLAG_JOBS", "1")
        .args(["batch", path_str(dir.path()), "--jobs", "4"])
        .output()
        .unwrap();
    let w = json(&out);
    let strip = |v: &Value| {
        v["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r["wall_ms"] = Value::Null;
                r
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&v), strip(&w));
}

#[test]
fn crosscheck_sample_files() {
    for name in ["q2_spanning", "q2_isotropic_span", "q4_coisotropic"] {
        let (code, v) = run(&["crosscheck", path_str(&sample(&format!("{name}.instance.json")))]);
        assert_eq!(code, 0, "{name}");
        assert_eq!(v["consistent"], true);
    }
}
