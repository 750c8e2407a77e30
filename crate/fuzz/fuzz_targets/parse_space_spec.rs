#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(space) = conclab_core::formats::parse_space_spec(s) {
            assert!(space.dim() > 0);
            let _ = space.summary();
        }
    }
});
