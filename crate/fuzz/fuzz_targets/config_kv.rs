//! The key=value config reader must never panic, and accepted input
//! must only produce non-empty keys.

#![no_main]

use barrierlab::config::parse_key_values;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(map) = parse_key_values(text) {
        for key in map.keys() {
            assert!(!key.is_empty(), "parser admitted an empty key");
            assert_eq!(key.trim(), key, "parser kept whitespace around a key");
        }
    }
});
