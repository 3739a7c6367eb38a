//! Arbitrary bytes through the linear-map parser: accepted maps must
//! round-trip through the writer.

#![no_main]

use boxworld::io;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(map) = io::parse_linear_map(data) {
        let json = io::linear_map_json(&map);
        let back = io::parse_linear_map(json.as_bytes()).expect("writer output must parse");
        assert_eq!(back, map);
    }
});
