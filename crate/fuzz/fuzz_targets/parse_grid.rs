#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = conclab_core::formats::parse_grid(s) {
            assert!(!g.is_empty() && g.iter().all(|v| v.is_finite()));
        }
    }
});
