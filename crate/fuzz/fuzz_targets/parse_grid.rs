#![no_main]

use bragg_entangle::config::{parse_grid_arg, MAX_GRID_POINTS};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(grid) = parse_grid_arg(text) {
            assert!(!grid.values.is_empty());
            assert!(grid.values.len() <= MAX_GRID_POINTS);
            assert!(grid.values.iter().all(|v| v.is_finite()));
        }
    }
});
