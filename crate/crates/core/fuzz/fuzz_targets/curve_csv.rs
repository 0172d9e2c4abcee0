#![no_main]

use libfuzzer_sys::fuzz_target;
use lookahead_core::harness::parse_curve_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(curve) = parse_curve_csv(data, "fuzz", 1) {
        assert!(!curve.points.is_empty());
        assert!(curve.points.iter().enumerate().all(|(i, p)| p.k == i + 1));
    }
});
