#![no_main]

use libfuzzer_sys::fuzz_target;
use magnus_cli::config::{parse_config, Purpose};

fuzz_target!(|data: &str| {
    if let Ok(cfg) = parse_config(data) {
        for purpose in [Purpose::Scan, Purpose::Profile, Purpose::Other] {
            let _ = cfg.resolve(purpose);
        }
    }
});
