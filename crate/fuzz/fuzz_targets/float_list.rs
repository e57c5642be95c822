//! The comma-separated float parser must never panic, and every
//! accepted list contains only finite values.

#![no_main]

use barrierlab::config::parse_float_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(values) = parse_float_list(text) {
        assert!(!values.is_empty(), "parser admitted an empty list");
        assert!(
            values.iter().all(|v| v.is_finite()),
            "parser admitted a non-finite value"
        );
    }
});
