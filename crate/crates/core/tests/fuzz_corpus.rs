//! Replays the checked-in fuzz seeds through the same entry points and
//! invariants as the fuzz targets.

use std::fs;
use std::path::PathBuf;

use bragg_entangle::config::{parse_config_str, parse_grid_arg, RunConfig, MAX_GRID_POINTS};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut paths: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    assert!(!paths.is_empty());
    paths.iter().map(|p| fs::read_to_string(p).unwrap()).collect()
}

#[test]
fn config_seeds() {
    let mut accepted = 0;
    for text in seeds("parse_config") {
        if let Ok(cfg) = parse_config_str(&text) {
            cfg.validate().unwrap();
            assert!(cfg.tau_grid().len() <= MAX_GRID_POINTS);
            accepted += 1;
        }
    }
    assert!(accepted >= 1);
}

#[test]
fn override_seeds() {
    for text in seeds("parse_override") {
        let mut cfg = RunConfig::default();
        for line in text.lines() {
            let _ = cfg.set(line);
        }
        let _ = cfg.validate();
    }
}

#[test]
fn grid_seeds() {
    for text in seeds("parse_grid") {
        if let Ok(grid) = parse_grid_arg(&text) {
            assert!(!grid.values.is_empty());
            assert!(grid.values.len() <= MAX_GRID_POINTS);
            assert!(grid.values.iter().all(|v| v.is_finite()));
        }
    }
}
