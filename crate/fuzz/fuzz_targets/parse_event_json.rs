#![no_main]

use conclab_core::spaces::ProductSpace;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(specs) = conclab_core::formats::parse_event_json(s) else {
        return;
    };
    // resolving against a small space must not panic
    let space = ProductSpace::uniform(3, 3).expect("valid space");
    for e in &specs {
        if let Ok(ev) = e.resolve(&space) {
            assert!(ev.measure() > 0.0 && ev.measure() <= 1.0 + 1e-12);
        }
    }
});
