#![no_main]

use libfuzzer_sys::fuzz_target;
use stein_discrete::io::{format_observations, parse_observations};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for dim in [None, Some(1), Some(3)] {
        if let Ok(sample) = parse_observations(text, dim) {
            let again = parse_observations(&format_observations(&sample), Some(sample.dim())).unwrap();
            assert_eq!(sample, again);
        }
    }
});
