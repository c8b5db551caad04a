#![no_main]

use cellhodge::experiment::BenchConfigJson;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(raw) = BenchConfigJson::parse(text) {
        let _ = raw.trajectory();
        assert!(raw.sigma_grid().is_ok());
    }
});
