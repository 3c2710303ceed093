#![no_main]

use libfuzzer_sys::fuzz_target;
use stein_discrete::harness::{format_configs, parse_configs};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(configs) = parse_configs(text) {
        let printed = format_configs(&configs);
        let again = parse_configs(&printed).unwrap();
        assert_eq!(printed, format_configs(&again));
        for c in &configs {
            let _ = c.validate();
        }
    }
});
