//! On-disk record cache: one JSON document per canonical polynomial,
//! guarded by a schema version and a SHA-256 checksum of the record.

use crate::cubic::CubicPoly;
use crate::theta::{PolyClassRecord, RecordStore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Bumped whenever a numeric convention in [`PolyClassRecord`] changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema_version: u32,
    pub key: CubicPoly,
    pub checksum: String,
    pub record: PolyClassRecord,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CacheError {
    #[error("malformed cache entry: {0}")]
    Malformed(String),
    #[error("schema version {found}, expected {expected}")]
    Version { found: u32, expected: u32 },
    #[error("checksum mismatch")]
    Checksum,
    #[error("key {key} does not match record {record}")]
    Key { key: CubicPoly, record: CubicPoly },
    #[error("inconsistent record: {0}")]
    Inconsistent(String),
}

pub fn checksum(record: &PolyClassRecord) -> String {
    let body = serde_json::to_vec(record).expect("records serialize");
    hex::encode(Sha256::digest(&body))
}

pub fn encode(record: &PolyClassRecord, version: u32) -> String {
    let entry = CacheEntry {
        schema_version: version,
        key: record.poly,
        checksum: checksum(record),
        record: record.clone(),
    };
    serde_json::to_string_pretty(&entry).expect("entries serialize")
}

/// Parses and checks an entry written under `version`.
pub fn decode(bytes: &[u8], version: u32) -> Result<PolyClassRecord, CacheError> {
    let entry: CacheEntry =
        serde_json::from_slice(bytes).map_err(|e| CacheError::Malformed(e.to_string()))?;
    if entry.schema_version != version {
        return Err(CacheError::Version {
            found: entry.schema_version,
            expected: version,
        });
    }
    if entry.key != entry.record.poly {
        return Err(CacheError::Key {
            key: entry.key,
            record: entry.record.poly,
        });
    }
    if checksum(&entry.record) != entry.checksum {
        return Err(CacheError::Checksum);
    }
    let r = &entry.record;
    if !r.poly.is_canonical() || !r.poly.is_admissible_unit_poly() {
        return Err(CacheError::Inconsistent(
            "key is not a canonical admissible polynomial".into(),
        ));
    }
    let again = r.recompute_contribution();
    if !(r.contribution > 0.0) || (again - r.contribution).abs() > 1e-9 * r.contribution.abs() {
        return Err(CacheError::Inconsistent(format!(
            "contribution {} does not match {again}",
            r.contribution
        )));
    }
    Ok(entry.record)
}

pub fn file_name(p: &CubicPoly) -> String {
    format!("{}_{}_{}.json", p.a, p.b, p.c)
}

/// Cache directory. Reads are lock free; writes go through [`RecordCache::store`],
/// which the caller runs from a single thread.
#[derive(Debug, Clone)]
pub struct RecordCache {
    pub dir: PathBuf,
    pub version: u32,
}

impl RecordCache {
    pub fn open(dir: impl AsRef<Path>) -> std::io::Result<RecordCache> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(RecordCache {
            dir: dir.as_ref().to_path_buf(),
            version: SCHEMA_VERSION,
        })
    }

    pub fn path(&self, p: &CubicPoly) -> PathBuf {
        self.dir.join(file_name(p))
    }

    /// Writes to a temporary file and renames it into place.
    pub fn store(&self, r: &PolyClassRecord) -> std::io::Result<()> {
        let target = self.path(&r.poly);
        let tmp = self.dir.join(format!(
            ".{}.{}.tmp",
            file_name(&r.poly),
            std::process::id()
        ));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(encode(r, self.version).as_bytes())?;
        f.sync_all()?;
        fs::rename(tmp, target)
    }

    pub fn read(&self, p: &CubicPoly) -> Option<Result<PolyClassRecord, CacheError>> {
        let bytes = fs::read(self.path(p)).ok()?;
        Some(decode(&bytes, self.version))
    }
}

impl RecordStore for RecordCache {
    fn load(&self, p: &CubicPoly, precision: u32) -> Option<PolyClassRecord> {
        match self.read(p)? {
            Ok(r) if r.poly == *p && r.alpha1.precision >= precision => Some(r),
            Ok(_) => None,
            Err(e) => {
                log::warn!("ignoring cache entry for {p}: {e}");
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{build_record, ThetaQuery};

    fn record() -> PolyClassRecord {
        build_record(&CubicPoly::new(-3, 0, 1), &ThetaQuery::new(10.0, 10.0)).unwrap()
    }

    #[test]
    fn round_trip() {
        let r = record();
        let text = encode(&r, SCHEMA_VERSION);
        assert!(text.contains("\"disc_field\": \"81\""));
        assert_eq!(decode(text.as_bytes(), SCHEMA_VERSION).unwrap(), r);
    }

    #[test]
    fn sweep_round_trips_bit_for_bit() {
        let en = crate::theta::enumerate_admissible(
            &ThetaQuery::new(20.0, 20.0),
            &crate::theta::NoStore,
        )
        .unwrap();
        for r in &en.records {
            let back = decode(encode(r, SCHEMA_VERSION).as_bytes(), SCHEMA_VERSION).unwrap();
            assert_eq!(
                back.contribution.to_bits(),
                r.contribution.to_bits(),
                "{}",
                r.poly
            );
            assert_eq!(&back, r);
        }
    }

    #[test]
    fn version_bump_invalidates() {
        let text = encode(&record(), SCHEMA_VERSION);
        assert!(matches!(
            decode(text.as_bytes(), SCHEMA_VERSION + 1),
            Err(CacheError::Version { .. })
        ));
    }

    #[test]
    fn tampering_is_detected() {
        let text = encode(&record(), SCHEMA_VERSION);
        let bad = text.replace("\"h\": 1", "\"h\": 2");
        assert_ne!(bad, text);
        assert_eq!(
            decode(bad.as_bytes(), SCHEMA_VERSION),
            Err(CacheError::Checksum)
        );
    }

    #[test]
    fn store_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let cache = RecordCache::open(dir.path()).unwrap();
        let r = record();
        assert!(cache.load(&r.poly, 128).is_none());
        cache.store(&r).unwrap();
        assert_eq!(cache.load(&r.poly, 128), Some(r.clone()));
        assert!(cache.load(&r.poly, 256).is_none());
        fs::write(cache.path(&r.poly), b"{ not json").unwrap();
        assert!(cache.load(&r.poly, 128).is_none());
    }
}
