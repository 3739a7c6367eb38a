//! Arbitrary bytes through the state-vector parser: accepted vectors must
//! round-trip through the writer.

#![no_main]

use boxworld::io;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(state) = io::parse_state_vector(data) {
        let json = io::state_vector_json(&state);
        let back = io::parse_state_vector(json.as_bytes()).expect("writer output must parse");
        assert_eq!(back, state);
    }
});
