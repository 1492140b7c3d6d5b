use std::path::Path;
use std::process::{Command, Output};

use lipsmooth_cli::RunConfig;
use serde_json::Value;

fn lipsmooth(args: &[&str], config: &str, out: &Path) -> Output {
    let cfg = out.join("config.json");
    std::fs::create_dir_all(out).unwrap();
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_lipsmooth"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(out.join("run"))
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn smooth_trivial_action() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipsmooth(&["smooth"], r#"{"demo":"trivial","R":3,"points":3}"#, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.path().join("run/matrix.csv")).unwrap();
    let mut lines = csv.lines();
    let stamp = lines.next().unwrap();
    assert!(stamp.starts_with(&format!("# lipsmooth {} config_sha256=", lipsmooth::VERSION)));
    assert_eq!(lines.next(), Some("i,j,p,q,truncated_lo,truncated_hi,lo,hi"));
    assert_eq!(lines.count(), 9);

    let json = read_json(&dir.path().join("run/smooth.json"));
    let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["command", "config_hash", "data", "library", "seed", "version"]);
    assert_eq!(stamp.rsplit('=').next(), json["config_hash"].as_str());
}

#[test]
fn conjugate_then_rerun_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"demo":"mobius","R":4,"conjugacy":{"grid_points":17}}"#;
    let a = lipsmooth(&["conjugate"], cfg, &dir.path().join("a"));
    let b = lipsmooth(&["conjugate", "--threads", "1"], cfg, &dir.path().join("b"));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    for name in ["conjugacy.csv", "conjugacy.json"] {
        let x = std::fs::read(dir.path().join("a/run").join(name)).unwrap();
        let y = std::fs::read(dir.path().join("b/run").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn seed_flag_changes_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"demo":"trivial","R":2,"points":2}"#;
    lipsmooth(&["smooth"], cfg, &dir.path().join("a"));
    lipsmooth(&["smooth", "--seed", "9"], cfg, &dir.path().join("b"));
    let a = read_json(&dir.path().join("a/run/smooth.json"));
    let b = read_json(&dir.path().join("b/run/smooth.json"));
    assert_ne!(a["config_hash"], b["config_hash"]);
    assert_eq!(b["seed"], 9);
}

#[test]
fn config_errors_exit_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipsmooth(&["smooth"], r#"{"demo":"pl","verify":{"pairz":3}}"#, dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verify"));

    let out = lipsmooth(&["smooth"], r#"{"demo":"pl","s":"1.0"}"#, dir.path());
    assert_eq!(out.status.code(), Some(2));

    let out = lipsmooth(&["smooth"], r#"{"demo":"pl","generators":[]}"#, dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_lipsmooth"))
        .args(["smooth", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn inconclusive_verification_exits_three() {
    // A quarter-radius ball for two generators needs R beyond the enumeration limit.
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"demo":"pl","verify":{"suites":["ball_inclusion"],"ball_radius":0.25}}"#;
    let out = lipsmooth(&["verify"], cfg, dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&dir.path().join("run/verify.json"));
    assert_eq!(json["data"]["status"], "inconclusive");
}

#[test]
fn verify_passes_on_small_suites() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"demo":"power","R":4,"points":5,"verify":{"suites":["metric_axioms","tail_honesty","effectiveness"],"tail_pairs":5}}"#;
    let out = lipsmooth(&["verify"], cfg, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("run/verify.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("suite,check,status,margin"));
}

fn schema_keys(schema: &Value, config: &Value, path: &str) {
    let props = &schema["properties"];
    for (key, value) in config.as_object().unwrap() {
        let sub = &props[key];
        assert!(!sub.is_null(), "{path}{key} missing from the schema");
        if value.is_object() && sub["properties"].is_object() {
            schema_keys(sub, value, &format!("{path}{key}."));
        }
    }
}

#[test]
fn schema_covers_every_config_field() {
    let schema: Value = serde_json::from_str(include_str!("../schema/run_config.schema.json")).unwrap();
    let cfg = RunConfig::from_json(r#"{"demo":"pl"}"#).unwrap();
    let effective: Value = serde_json::from_str(&cfg.canonical_json()).unwrap();
    schema_keys(&schema, &effective, "");
}

#[test]
fn pinned_configs_load() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["pl.json", "power.json"] {
        RunConfig::from_path(&root.join(name)).unwrap();
    }
}

#[test]
fn trivial_conjugacy_is_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipsmooth(&["conjugate"], r#"{"demo":"trivial","R":4,"conjugacy":{"grid_points":9}}"#, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("run/conjugacy.csv")).unwrap();
    let mut rows = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (p, lo, hi) = (col("p_float"), col("lo"), col("hi"));
    let mut n = 0;
    for row in rows.records() {
        let row = row.unwrap();
        let x: f64 = row[p].parse().unwrap();
        let (a, b): (f64, f64) = (row[lo].parse().unwrap(), row[hi].parse().unwrap());
        assert!(a <= x && x <= b && b - a < 1e-12, "{x} not in [{a}, {b}]");
        n += 1;
    }
    assert_eq!(n, 9);
}
