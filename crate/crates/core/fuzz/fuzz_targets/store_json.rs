#![no_main]

use libfuzzer_sys::fuzz_target;
use lookahead_core::learners::EmpiricalStore;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(store) = EmpiricalStore::from_json(text) {
        let saved = store.to_json();
        let again = EmpiricalStore::from_json(&saved).expect("saved store reloads");
        assert_eq!(again.to_json(), saved);
    }
});
