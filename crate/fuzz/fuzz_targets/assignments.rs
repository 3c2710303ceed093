#![no_main]

use libfuzzer_sys::fuzz_target;
use stein_discrete::io::{format_assignments, parse_assignments, parse_grid, ModelDescription};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(values) = parse_assignments(text) {
        let printed = format_assignments(&values);
        let again = parse_assignments(&printed).unwrap();
        assert_eq!(printed, format_assignments(&again));
    }
    // `--params` and `--fixed` for every family; building must not panic
    for family in ["poisson", "binomial", "ys", "bnb", "lg", "truncpoisson", "truncbinomial", "nm", "tnm", "dnm"] {
        if let Ok(model) = ModelDescription::from_flags(family, Some(text), Some(text)) {
            let _ = model.build();
        }
    }
    let _ = parse_grid(text);
});
