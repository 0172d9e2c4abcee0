#![no_main]

use libfuzzer_sys::fuzz_target;
use lookahead_core::envfile::{parse_env_json, to_env_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(mdp) = parse_env_json(text) {
        // a parsed model must serialize to a file that parses to itself
        let saved = to_env_json(&mdp);
        let again = parse_env_json(&saved).expect("saved model reparses");
        assert_eq!(to_env_json(&again), saved);
    }
});
