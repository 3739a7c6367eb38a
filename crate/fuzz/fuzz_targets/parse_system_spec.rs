//! Arbitrary bytes through the system-spec parser: accepted specs must
//! round-trip through the writer.

#![no_main]

use boxworld::io;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(sys) = io::parse_system_spec(data) {
        let json = io::system_spec_json(&sys);
        let back = io::parse_system_spec(json.as_bytes()).expect("writer output must parse");
        assert_eq!(back, sys);
    }
});
