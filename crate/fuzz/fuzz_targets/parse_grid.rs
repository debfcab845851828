#![no_main]

use libfuzzer_sys::fuzz_target;
use magnus_cli::units::{format_grid, parse_grid};

fuzz_target!(|data: &str| {
    if let Ok(spec) = parse_grid(data) {
        assert_eq!(parse_grid(&format_grid(&spec)), Ok(spec));
    }
});
