//! The geometry-name parser must never panic, and every accepted name
//! must survive a Display -> reparse round trip.

#![no_main]

use std::str::FromStr;

use barrierlab::GeometryKind;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(kind) = GeometryKind::from_str(text) {
        let reparsed = GeometryKind::from_str(&kind.to_string()).expect("round trip rejected");
        assert_eq!(kind, reparsed, "round trip changed the kind");
    }
});
