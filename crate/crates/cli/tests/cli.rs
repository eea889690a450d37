use std::path::{Path, PathBuf};
use std::process::Command;

use ghostsim::RunConfig;
use serde_json::Value;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn ghostsim(args: &[&str], config: &Path, out: &Path) -> (i32, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_ghostsim"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--workers", "1"])
        .output()
        .expect("binary runs");
    (output.status.code().unwrap_or(-1), String::from_utf8_lossy(&output.stderr).into_owned())
}

fn write_config(dir: &Path, name: &str, doc: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    path
}

fn strong() -> Value {
    let text = std::fs::read_to_string(configs_dir().join("strong.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn reference_configs_parse_and_resolve() {
    for name in ["strong.json", "weak.json"] {
        let cfg = RunConfig::load(&configs_dir().join(name)).unwrap();
        cfg.resolve().unwrap();
    }
}

#[test]
fn snapshot_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, err) = ghostsim(&["duality"], &configs_dir().join("strong.json"), tmp.path());
    assert_eq!(code, 0, "{err}");
    let original = RunConfig::load(&configs_dir().join("strong.json")).unwrap();
    let snapshot = RunConfig::load(&tmp.path().join("config.json")).unwrap();
    assert_eq!(original, snapshot);
    assert_eq!(original.hash(), snapshot.hash());
    let doc = read_json(&tmp.path().join("duality.json"));
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["config_hash"], original.hash());
}

#[test]
fn orthogonal_detector_gives_full_which_path() {
    let tmp = tempfile::tempdir().unwrap();
    let mut doc = strong();
    doc["detector"] = serde_json::json!({ "uniform": { "n": 3, "s": 0.0 } });
    let cfg = write_config(tmp.path(), "cfg.json", &doc);
    let out = tmp.path().join("out");
    let (code, err) = ghostsim(&["duality"], &cfg, &out);
    assert_eq!(code, 0, "{err}");
    let report = &read_json(&out.join("duality.json"))["report"];
    assert!((report["d_q1"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(report["c2_pattern"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn equal_envelope_sweep_saturates() {
    let tmp = tempfile::tempdir().unwrap();
    let mut doc = strong();
    doc["envelopes"] = "equal".into();
    doc["sweep"] = serde_json::json!([{ "path": "detector.uniform.s", "min": 0.0, "max": 1.0, "steps": 21 }]);
    let cfg = write_config(tmp.path(), "cfg.json", &doc);
    let out = tmp.path().join("out");
    let (code, err) = ghostsim(&["sweep"], &cfg, &out);
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header, ["detector.uniform.s", "d_q1", "c2_matrix", "c2_pattern", "sum"]);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 21);
    for row in rows {
        let sum: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
        assert!((sum - 1.0).abs() < 1e-9, "{row}");
    }
}

#[test]
fn pattern_artifacts_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let mut doc = strong();
    doc["grid"] = serde_json::json!({ "points": 801, "periods": 6.0 });
    let cfg = write_config(tmp.path(), "cfg.json", &doc);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(ghostsim(&["pattern"], &cfg, &a).0, 0);
    assert_eq!(ghostsim(&["pattern"], &cfg, &b).0, 0);
    for f in ["pattern.csv", "pattern.json", "pattern.svg", "config.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(a.join("pattern.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("z2,intensity,incoherent"));
    assert_eq!(lines.count(), 801);
    let svg = std::fs::read_to_string(a.join("pattern.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let mut doc = strong();
    doc["geometry"]["epsilon"] = (-1.0).into();
    let cfg = write_config(tmp.path(), "neg.json", &doc);
    let (code, err) = ghostsim(&["pattern"], &cfg, &tmp.path().join("o1"));
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("geometry"), "{err}");

    let mut doc = strong();
    doc["detector"] = serde_json::json!({ "uniform": { "n": 2, "s": 0.5 } });
    let cfg = write_config(tmp.path(), "mismatch.json", &doc);
    assert_eq!(ghostsim(&["duality"], &cfg, &tmp.path().join("o2")).0, 2);

    let mut doc = strong();
    doc["unknown_field"] = 1.into();
    let cfg = write_config(tmp.path(), "unknown.json", &doc);
    assert_eq!(ghostsim(&["duality"], &cfg, &tmp.path().join("o3")).0, 2);

    let (code, _) = ghostsim(&["duality"], &tmp.path().join("missing.json"), &tmp.path().join("o4"));
    assert_eq!(code, 2);
}

#[test]
fn narrow_oracle_grid_is_a_resolution_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut doc = strong();
    doc["oracle"] = serde_json::json!({ "extent": 25.6, "points": 256, "padding": 0.25 });
    let cfg = write_config(tmp.path(), "coarse.json", &doc);
    let (code, err) = ghostsim(&["oracle-compare"], &cfg, &tmp.path().join("o"));
    assert_eq!(code, 3, "{err}");
}

#[test]
fn oracle_compare_agrees_on_strong_config() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, err) = ghostsim(&["oracle-compare"], &configs_dir().join("strong.json"), tmp.path());
    assert_eq!(code, 0, "{err}");
    let doc = read_json(&tmp.path().join("oracle-compare.json"));
    assert_eq!(doc["schema"], 1);
    assert!(doc["violations"].as_array().unwrap().is_empty());
    for f in ["analytic.csv", "oracle.csv", "oracle.svg"] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
}
