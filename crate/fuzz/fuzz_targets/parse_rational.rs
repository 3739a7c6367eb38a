//! Arbitrary text through the rational parser: accepted literals must
//! round-trip through the canonical rendering.

#![no_main]

use boxworld::rational::Rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(value) = text.parse::<Rational>() {
        let rendered = value.to_string();
        let back: Rational = rendered.parse().expect("canonical form must parse");
        assert_eq!(back, value);
        assert_eq!(back.to_string(), rendered);
    }
});
