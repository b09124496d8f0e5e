use pgt_core::cache::{decode, encode, CacheError, SCHEMA_VERSION};
use pgt_core::theta::PolyClassRecord;
use std::fs;
use std::path::Path;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn cache_seeds_decode() {
    let all = seeds("cache_decode");
    assert!(all.len() > 5);
    for (name, bytes) in all {
        match decode(&bytes, SCHEMA_VERSION) {
            Ok(r) => {
                assert_eq!(encode(&r, SCHEMA_VERSION).as_bytes(), &bytes[..], "{name}");
            }
            Err(e) => {
                assert_eq!(name, "seed_empty.json");
                assert!(matches!(e, CacheError::Malformed(_)));
            }
        }
    }
}

#[test]
fn record_seeds_parse() {
    for (name, bytes) in seeds("record_json") {
        let r: PolyClassRecord = serde_json::from_slice(&bytes).unwrap();
        assert!(
            (r.recompute_contribution() - r.contribution).abs() <= 1e-12 * r.contribution,
            "{name}"
        );
    }
}
