#![no_main]

use bragg_entangle::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let mut cfg = RunConfig::default();
        for line in text.lines() {
            let _ = cfg.set(line);
        }
        let _ = cfg.validate();
    }
});
