//! The energy grammar must never panic, and every accepted spec must
//! survive a Display -> reparse round trip.

#![no_main]

use std::str::FromStr;

use barrierlab::EnergySpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = EnergySpec::from_str(text) {
        let printed = spec.to_string();
        let reparsed = EnergySpec::from_str(&printed)
            .unwrap_or_else(|e| panic!("round trip rejected {printed:?}: {e}"));
        assert_eq!(spec, reparsed, "round trip changed the spec");
    }
});
