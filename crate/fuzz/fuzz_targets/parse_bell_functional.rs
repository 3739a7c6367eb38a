//! Arbitrary bytes through the Bell-functional parser, against a system
//! picked by the leading byte: accepted functionals must round-trip
//! through the writer.

#![no_main]

use boxworld::io;
use boxworld::theory::{SiteSpec, SystemSpec};
use libfuzzer_sys::fuzz_target;

fn system(selector: u8) -> SystemSpec {
    match selector % 3 {
        0 => SystemSpec::gbits(1).unwrap(),
        1 => SystemSpec::gbits(2).unwrap(),
        _ => SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()]).unwrap(),
    }
}

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let sys = system(selector);
    if let Ok(functional) = io::parse_bell_functional(rest, &sys) {
        let json = io::bell_functional_json(&functional);
        let back =
            io::parse_bell_functional(json.as_bytes(), &sys).expect("writer output must parse");
        assert_eq!(back, functional);
    }
});
