#![no_main]
use libfuzzer_sys::fuzz_target;

use otindex::format::{deserialize, serialize};

fuzz_target!(|data: &[u8]| {
    if let Ok(idx) = deserialize(data) {
        let again = deserialize(&serialize(&idx)).expect("re-encoded index must parse");
        assert_eq!(again, idx);
    }
});
