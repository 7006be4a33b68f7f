#![no_main]

use bragg_entangle::config::parse_config_str;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = parse_config_str(text) {
            assert!(cfg.validate().is_ok());
            assert!(cfg.tau_grid().len() <= bragg_entangle::config::MAX_GRID_POINTS);
        }
    }
});
