#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(space) = conclab_core::formats::parse_space_json(s) {
            for f in space.factors() {
                let total: f64 = f.weights().iter().sum();
                assert!((total - 1.0).abs() < 1e-6);
            }
        }
    }
});
