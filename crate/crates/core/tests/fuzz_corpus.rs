//! Replays the checked-in fuzz corpus through the same assertions as the
//! fuzz targets.

use std::path::PathBuf;

use lookahead_core::envfile::{parse_env_json, to_env_json};
use lookahead_core::harness::{parse_curve_csv, Checkpoint, ExperimentConfig};
use lookahead_core::learners::EmpiricalStore;

/// Every seed file under `fuzz/corpus/<target>`, sorted by path.
fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut out: Vec<(PathBuf, Vec<u8>)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn env_json_seeds() {
    let mut parsed = 0;
    for (path, bytes) in seeds("env_json") {
        let text = String::from_utf8(bytes).unwrap();
        if let Ok(mdp) = parse_env_json(&text) {
            let saved = to_env_json(&mdp);
            let again = parse_env_json(&saved).unwrap();
            assert_eq!(to_env_json(&again), saved, "{}", path.display());
            parsed += 1;
        }
    }
    assert!(parsed >= 4);
}

#[test]
fn store_json_seeds() {
    for (path, bytes) in seeds("store_json") {
        let text = String::from_utf8(bytes).unwrap();
        let store =
            EmpiricalStore::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let saved = store.to_json();
        assert_eq!(EmpiricalStore::from_json(&saved).unwrap().to_json(), saved);
    }
}

#[test]
fn config_json_seeds() {
    for (path, bytes) in seeds("config_json") {
        let text = String::from_utf8(bytes).unwrap();
        let config = ExperimentConfig::from_json(&text)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(
            ExperimentConfig::from_json(&config.to_json()).unwrap(),
            config
        );
    }
}

#[test]
fn curve_csv_seeds() {
    let mut parsed = 0;
    for (_, bytes) in seeds("curve_csv") {
        if let Ok(curve) = parse_curve_csv(bytes.as_slice(), "fuzz", 1) {
            assert!(curve.points.iter().enumerate().all(|(i, p)| p.k == i + 1));
            parsed += 1;
        }
    }
    assert_eq!(parsed, 2);
}

#[test]
fn checkpoint_json_seeds() {
    for (path, bytes) in seeds("checkpoint_json") {
        let text = String::from_utf8(bytes).unwrap();
        let ckpt =
            Checkpoint::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let saved = ckpt.to_json();
        assert_eq!(Checkpoint::from_json(&saved).unwrap().to_json(), saved);
    }
}
