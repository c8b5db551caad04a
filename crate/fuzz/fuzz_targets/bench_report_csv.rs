#![no_main]

use cellhodge::experiment::BenchReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = BenchReport::parse_csv(text) {
        let again = BenchReport::parse_csv(&r.to_csv()).unwrap();
        assert_eq!(again.to_csv(), r.to_csv());
    }
});
