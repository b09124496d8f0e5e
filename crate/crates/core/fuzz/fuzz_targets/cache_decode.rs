#![no_main]

use libfuzzer_sys::fuzz_target;
use pgt_core::cache::{decode, encode, SCHEMA_VERSION};

fuzz_target!(|data: &[u8]| {
    if let Ok(r) = decode(data, SCHEMA_VERSION) {
        // anything accepted must survive a round trip
        let again = decode(encode(&r, SCHEMA_VERSION).as_bytes(), SCHEMA_VERSION).expect("re-encoded entry decodes");
        assert_eq!(r, again);
    }
});
