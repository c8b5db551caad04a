#![no_main]

use cellhodge::Cochain;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = Cochain::parse_csv(text) {
        assert_eq!(Cochain::parse_csv(&c.to_csv()).unwrap(), c);
    }
});
