#![no_main]

use duhamel::config::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = ExperimentConfig::from_json_str(text) else { return };
    let again = ExperimentConfig::from_json_str(&cfg.normalized_json().to_string())
        .expect("normalized config re-parses");
    assert_eq!(again.normalized(), cfg.normalized());
});
