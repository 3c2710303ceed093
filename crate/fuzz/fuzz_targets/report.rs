#![no_main]

use libfuzzer_sys::fuzz_target;
use stein_discrete::harness::{format_report, parse_report};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = parse_report(text) {
        let Ok(printed) = format_report(&rows) else { return };
        let again = parse_report(&printed).unwrap();
        assert_eq!(printed, format_report(&again).unwrap());
    }
});
