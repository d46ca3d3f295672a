use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CoeffError, CoeffStream, FunctionSpec};
use crate::mpnum::BigReal;

/// One line of a cached stream file.
#[derive(Debug, Serialize, Deserialize)]
struct Record {
    k: usize,
    v: String,
    bits: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    hash: String,
    spec: FunctionSpec,
    provenance: String,
}

/// Directory of coefficient streams: one JSON-lines file per
/// `(spec hash, precision)` plus a `<hash>.manifest.json` sidecar holding
/// the spec. Every write goes to a temporary file that is renamed into
/// place, so readers never see partial files.
#[derive(Clone, Debug)]
pub struct CoeffCache {
    dir: PathBuf,
}

impl CoeffCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, CoeffError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(CoeffCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn stream_path(&self, spec: &FunctionSpec, prec: u32) -> PathBuf {
        self.dir.join(format!("{}-{}.jsonl", spec.hash(), prec))
    }

    pub fn sidecar_path(&self, spec: &FunctionSpec) -> PathBuf {
        self.dir.join(format!("{}.manifest.json", spec.hash()))
    }

    pub fn store(&self, stream: &CoeffStream) -> Result<(), CoeffError> {
        let mut body = String::new();
        for (k, v) in stream.values().iter().enumerate() {
            let rec = Record {
                k,
                v: v.to_decimal(),
                bits: stream.precision_bits,
            };
            body.push_str(&serde_json::to_string(&rec)?);
            body.push('\n');
        }
        atomic_write(&self.stream_path(&stream.spec, stream.precision_bits), body.as_bytes())?;
        let side = Sidecar {
            hash: stream.spec.hash(),
            spec: stream.spec.clone(),
            provenance: stream.provenance.clone(),
        };
        atomic_write(&self.sidecar_path(&stream.spec), serde_json::to_string_pretty(&side)?.as_bytes())?;
        Ok(())
    }

    /// The cached stream for `spec` at exactly `prec` bits, if any.
    pub fn load(&self, spec: &FunctionSpec, prec: u32) -> Result<Option<CoeffStream>, CoeffError> {
        let path = self.stream_path(spec, prec);
        let side_path = self.sidecar_path(spec);
        if !path.exists() || !side_path.exists() {
            return Ok(None);
        }
        let side: Sidecar = serde_json::from_slice(&fs::read(&side_path)?)?;
        if side.spec != *spec {
            return Err(CoeffError::CacheCorruption {
                k: 0,
                detail: format!("hash {} belongs to a different spec", side.hash),
            });
        }
        let mut values = Vec::new();
        for line in BufReader::new(fs::File::open(&path)?).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Record = serde_json::from_str(&line)?;
            if rec.k != values.len() || rec.bits != prec {
                return Err(CoeffError::CacheCorruption {
                    k: rec.k,
                    detail: format!("unexpected record in {}", path.display()),
                });
            }
            values.push(BigReal::parse(&rec.v, prec)?);
        }
        if values.is_empty() {
            return Ok(None);
        }
        Ok(Some(CoeffStream::from_values(spec.clone(), values, prec, side.provenance)))
    }
}

pub(crate) fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{generate, generate_cached};

    #[test]
    fn round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoeffCache::new(dir.path()).unwrap();
        let stream = generate(&FunctionSpec::exponential(), 12, 200).unwrap();
        cache.store(&stream).unwrap();
        let back = cache.load(&stream.spec, 200).unwrap().unwrap();
        assert_eq!(back, stream);
        assert!(cache.load(&stream.spec, 256).unwrap().is_none());
    }

    #[test]
    fn cached_generation_extends_and_truncates() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoeffCache::new(dir.path()).unwrap();
        let spec = FunctionSpec::catalan();
        let short = generate_cached(&spec, 4, 128, Some(&cache)).unwrap();
        assert_eq!(short.max_index(), 4);
        let long = generate_cached(&spec, 9, 128, Some(&cache)).unwrap();
        assert_eq!(long.max_index(), 9);
        let again = generate_cached(&spec, 6, 128, Some(&cache)).unwrap();
        assert_eq!(again.max_index(), 6);
        assert_eq!(again.values(), &long.values()[..7]);
    }

    #[test]
    fn record_format() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CoeffCache::new(dir.path()).unwrap();
        let stream = generate(&FunctionSpec::geometric("1/2"), 1, 64).unwrap();
        cache.store(&stream).unwrap();
        let text = fs::read_to_string(cache.stream_path(&stream.spec, 64)).unwrap();
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["k"], 0);
        assert_eq!(first["bits"], 64);
        assert!(first["v"].is_string());
    }
}
