#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = workbench::config::ExperimentConfig::from_json(text) {
        // accepted configs satisfy their invariants
        assert!(cfg.validate().is_ok());
        assert!(cfg.depth >= 1 && cfg.trials >= 1);
    }
});
