#![no_main]

use libfuzzer_sys::fuzz_target;
use lookahead_core::harness::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = ExperimentConfig::from_json(text) {
        let back = ExperimentConfig::from_json(&config.to_json());
        assert_eq!(back.ok().as_ref(), Some(&config));
    }
});
