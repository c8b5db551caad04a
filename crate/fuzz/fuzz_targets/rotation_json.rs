#![no_main]

use cellhodge::complex::RotationJson;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(raw) = RotationJson::parse(text) {
        if let Ok(c) = raw.to_complex() {
            assert_eq!(c.euler_characteristic(), 1);
        }
    }
});
