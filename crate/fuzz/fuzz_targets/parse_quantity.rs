#![no_main]

use libfuzzer_sys::fuzz_target;
use magnus_cli::units::{parse_omega, parse_quantity, Dimension};

fuzz_target!(|data: &str| {
    for d in [
        Dimension::Length,
        Dimension::Energy,
        Dimension::Mass,
        Dimension::MagneticField,
        Dimension::AngularFrequency,
        Dimension::Time,
        Dimension::Angle,
    ] {
        if let Ok(v) = parse_quantity(data, d) {
            assert!(v.is_finite());
        }
    }
    let _ = parse_omega(data);
});
