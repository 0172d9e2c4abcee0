#![no_main]

use libfuzzer_sys::fuzz_target;
use lookahead_core::harness::Checkpoint;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ckpt) = Checkpoint::from_json(text) {
        let saved = ckpt.to_json();
        let again = Checkpoint::from_json(&saved).expect("saved checkpoint reloads");
        assert_eq!(again.to_json(), saved);
    }
});
