#![no_main]

use libfuzzer_sys::fuzz_target;
use pgt_core::theta::PolyClassRecord;

fuzz_target!(|data: &[u8]| {
    if let Ok(r) = serde_json::from_slice::<PolyClassRecord>(data) {
        let _ = r.recompute_contribution();
        let _ = r.alphas();
        let _ = r.roots_f64();
        let text = serde_json::to_string(&r).unwrap();
        let back: PolyClassRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
});
