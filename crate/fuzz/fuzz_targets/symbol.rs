#![no_main]

use duhamel::config::parse_symbol;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&d, rest)) = data.split_first() else { return };
    let d = 1 + (d % 3) as usize;
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let Ok(g) = parse_symbol(text, d) else { return };
    let xi = vec![0.75; d];
    if let Ok(v) = g.evaluate(&xi) {
        assert!(v.re.is_nan() || v.re >= -1e-12 * v.norm());
    }
    let _ = g.check_hermitian(&[xi], 1e-9);
});
