#![no_main]

use duhamel::config::parse_temporal_profile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse_temporal_profile(text) else { return };
    for w in p.segments().windows(2) {
        assert!(w[0].end <= w[1].start);
    }
    for (s, t) in [(-1.0, 0.5), (0.0, 2.0), (1.0, 10.0)] {
        let _ = p.primitive(t) - p.primitive(s) - p.mass_between(s, t);
    }
});
