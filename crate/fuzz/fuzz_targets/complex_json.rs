#![no_main]

use cellhodge::complex::parse_complex_json;
use cellhodge::boundary::boundary_product;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_complex_json(text) {
        // anything accepted must be exact and survive a round trip
        assert!(boundary_product(&c).iter().flatten().all(|&v| v == 0));
        assert_eq!(parse_complex_json(&c.to_json()).unwrap(), c);
    }
});
