//! On-disk cache of log|L(½+it)| grids.
//!
//! An entry is keyed by (id, t0, t1, step, precision, clamp floor, version)
//! with the floats written bit-exactly. The file name is a digest of the key
//! and the key itself is stored in the header, so a digest collision or a
//! truncated file reads as a miss.
//!
//! Layout: magic, u32 key length, key bytes, u64 sample count, samples as
//! little-endian f64, u64 clamp count, clamp indices as u64.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use lmoments::lfunc::{log_abs_grid_with, CriticalLineGrid, GridOptions, GridSpec, LFunctionId};
use sha2::{Digest, Sha256};

const MAGIC: &[u8; 8] = b"LMGRID\x00\x01";

/// Bumped whenever grid values could change for the same key.
pub const CACHE_VERSION: &str = concat!("lmoments-", env!("CARGO_PKG_VERSION"), "/grid-1");

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

pub struct GridCache {
    dir: Option<PathBuf>,
    version: String,
    pub stats: CacheStats,
}

fn key(id: &LFunctionId, spec: &GridSpec, opts: &GridOptions, version: &str) -> String {
    format!(
        "id={id};t0={:016x};t1={:016x};step={:016x};precision={:016x};floor={:016x};version={version}",
        spec.t0.to_bits(),
        spec.t1.to_bits(),
        spec.step.to_bits(),
        opts.precision.to_bits(),
        opts.clamp_floor.to_bits(),
    )
}

fn read_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn bad(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

impl GridCache {
    /// `dir = None` disables caching; every request is a miss that is not stored.
    pub fn new(dir: Option<PathBuf>, version: impl Into<String>) -> Self {
        Self { dir, version: version.into(), stats: CacheStats::default() }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        let d = self.dir.as_ref()?;
        let digest = Sha256::digest(key.as_bytes());
        Some(d.join(format!("{digest:x}.grid")))
    }

    pub fn get(
        &mut self,
        id: &LFunctionId,
        spec: GridSpec,
        opts: GridOptions,
    ) -> lmoments::Result<CriticalLineGrid> {
        let key = key(id, &spec, &opts, &self.version);
        if let Some(path) = self.path(&key) {
            if path.exists() {
                match load(&path, &key, id, spec, opts) {
                    Ok(g) => {
                        self.stats.hits += 1;
                        return Ok(g);
                    }
                    Err(e) => {
                        log::warn!("evicting corrupt cache entry {}: {e}", path.display());
                        let _ = fs::remove_file(&path);
                    }
                }
            }
        }
        self.stats.misses += 1;
        let grid = log_abs_grid_with(id, spec, opts)?;
        if let Some(path) = self.path(&key) {
            if let Err(e) = store(&path, &key, &grid) {
                log::warn!("could not write cache entry {}: {e}", path.display());
            }
        }
        Ok(grid)
    }
}

fn store(path: &Path, key: &str, g: &CriticalLineGrid) -> io::Result<()> {
    if let Some(d) = path.parent() {
        fs::create_dir_all(d)?;
    }
    let mut buf = Vec::with_capacity(32 + key.len() + 8 * (g.values.len() + g.clamped.len()));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(key.len() as u32).to_le_bytes());
    buf.extend_from_slice(key.as_bytes());
    buf.extend_from_slice(&(g.values.len() as u64).to_le_bytes());
    for v in &g.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(g.clamped.len() as u64).to_le_bytes());
    for &i in &g.clamped {
        buf.extend_from_slice(&(i as u64).to_le_bytes());
    }
    // Write then rename so a crash never leaves a half-written entry under the real name.
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp)?;
    f.write_all(&buf)?;
    f.sync_all()?;
    fs::rename(tmp, path)
}

fn load(path: &Path, key: &str, id: &LFunctionId, spec: GridSpec, opts: GridOptions) -> io::Result<CriticalLineGrid> {
    let bytes = fs::read(path)?;
    let mut r = bytes.as_slice();
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("bad magic"));
    }
    let mut kl = [0u8; 4];
    r.read_exact(&mut kl)?;
    let kl = u32::from_le_bytes(kl) as usize;
    if r.len() < kl {
        return Err(bad("truncated key"));
    }
    let (stored, rest) = r.split_at(kl);
    if stored != key.as_bytes() {
        return Err(bad("key mismatch"));
    }
    r = rest;
    let n = read_u64(&mut r)? as usize;
    if n != spec.len() || r.len() < 8 * n + 8 {
        return Err(bad("sample count mismatch"));
    }
    let values: Vec<f64> = (0..n).map(|_| read_u64(&mut r).map(f64::from_bits)).collect::<io::Result<_>>()?;
    let m = read_u64(&mut r)? as usize;
    if r.len() != 8 * m {
        return Err(bad("clamp list length mismatch"));
    }
    let clamped: Vec<usize> = (0..m).map(|_| read_u64(&mut r).map(|i| i as usize)).collect::<io::Result<_>>()?;
    if clamped.iter().any(|&i| i >= n) {
        return Err(bad("clamp index out of range"));
    }
    Ok(CriticalLineGrid {
        id: id.clone(),
        spec,
        values,
        clamp_floor: opts.clamp_floor,
        precision: opts.precision,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (tempfile::TempDir, GridSpec) {
        (tempfile::tempdir().unwrap(), GridSpec::new(100.0, 110.0, 0.05).unwrap())
    }

    #[test]
    fn hit_after_miss_is_bit_exact() {
        let (dir, spec) = setup();
        let mut c = GridCache::new(Some(dir.path().into()), CACHE_VERSION);
        let a = c.get(&LFunctionId::Zeta, spec, GridOptions::default()).unwrap();
        let b = c.get(&LFunctionId::Zeta, spec, GridOptions::default()).unwrap();
        assert_eq!(c.stats, CacheStats { hits: 1, misses: 1 });
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_eq!(a.clamped, b.clamped);
    }

    #[test]
    fn step_and_version_change_miss() {
        let (dir, spec) = setup();
        let mut c = GridCache::new(Some(dir.path().into()), CACHE_VERSION);
        c.get(&LFunctionId::Zeta, spec, GridOptions::default()).unwrap();
        let finer = GridSpec::new(100.0, 110.0, 0.025).unwrap();
        c.get(&LFunctionId::Zeta, finer, GridOptions::default()).unwrap();
        assert_eq!(c.stats.misses, 2);
        let mut bumped = GridCache::new(Some(dir.path().into()), "next");
        bumped.get(&LFunctionId::Zeta, spec, GridOptions::default()).unwrap();
        assert_eq!(bumped.stats, CacheStats { hits: 0, misses: 1 });
    }

    #[test]
    fn corrupt_entry_is_evicted() {
        let (dir, spec) = setup();
        let mut c = GridCache::new(Some(dir.path().into()), CACHE_VERSION);
        let a = c.get(&LFunctionId::Zeta, spec, GridOptions::default()).unwrap();
        let entry = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
        let bytes = fs::read(&entry).unwrap();
        fs::write(&entry, &bytes[..bytes.len() / 2]).unwrap();
        let b = c.get(&LFunctionId::Zeta, spec, GridOptions::default()).unwrap();
        assert_eq!(c.stats.misses, 2);
        assert_eq!(a.values, b.values);
        // The recomputed entry is valid again.
        c.get(&LFunctionId::Zeta, spec, GridOptions::default()).unwrap();
        assert_eq!(c.stats.hits, 1);
    }
}
