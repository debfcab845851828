#![no_main]

use libfuzzer_sys::fuzz_target;
use magnus_cli::units::parse_range;

fuzz_target!(|data: &str| {
    if let Ok((from, to)) = parse_range(data) {
        assert!(from < to);
    }
});
