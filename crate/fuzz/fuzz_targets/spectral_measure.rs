#![no_main]

use duhamel::config::parse_spectral_measure;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&d, rest)) = data.split_first() else { return };
    let d = 1 + (d % 3) as usize;
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let Ok(m) = parse_spectral_measure(text, d) else { return };
    let tv = m.total_variation();
    assert!(tv >= 0.0 || tv.is_nan());
    let h = m.hermitian_symmetrize();
    assert_eq!(h.dimension(), d);
});
