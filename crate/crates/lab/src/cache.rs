//! On-disk spectrum cache.
//!
//! One text file per spectrum. The header carries the format version, the
//! sha256 of the canonical inputs and the solver provenance; each following
//! line is `k value` with enough digits to round-trip. A missing file, a
//! version or key mismatch, or a malformed body all mean "recompute".

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use spectral_trace_core::spectra::ClusteredSpectrum;

use crate::error::LabError;

pub const FORMAT_VERSION: &str = "spectral-trace-cache v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// `-Δ + q`.
    Mu,
    /// `-Δ` alone.
    Lambda,
}

impl SpectrumKind {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumKind::Mu => "mu",
            SpectrumKind::Lambda => "lambda",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
}

#[derive(Debug, Clone)]
pub struct SpectrumCache {
    dir: PathBuf,
}

pub fn cache_key(identity: &str, kind: SpectrumKind) -> String {
    let digest = Sha256::digest(format!("{FORMAT_VERSION};kind={};{identity}", kind.name()).as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn encode(spectrum: &ClusteredSpectrum, key: &str) -> String {
    let mut s = format!("# {FORMAT_VERSION} sha256={key} k_max={} provenance={}\n", spectrum.k_max_reliable, spectrum.provenance);
    for (k, cluster) in spectrum.clusters.iter().enumerate() {
        for v in cluster {
            let _ = writeln!(s, "{k} {v:.16e}");
        }
    }
    s
}

/// `None` when the text is not a valid entry for `key`.
pub fn decode(text: &str, key: &str) -> Option<ClusteredSpectrum> {
    let mut lines = text.lines();
    let header = lines.next()?.strip_prefix("# ")?.strip_prefix(FORMAT_VERSION)?;
    let mut fields = header.trim_start().splitn(3, ' ');
    if fields.next()?.strip_prefix("sha256=")? != key {
        return None;
    }
    let k_max_reliable = fields.next()?.strip_prefix("k_max=")?.parse().ok()?;
    let provenance = fields.next()?.strip_prefix("provenance=")?.to_string();
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for line in lines {
        let (k, v) = line.split_once(' ')?;
        let k: usize = k.parse().ok()?;
        let v: f64 = v.parse().ok()?;
        if k + 1 < clusters.len() || k > clusters.len() {
            return None;
        }
        if k == clusters.len() {
            clusters.push(Vec::new());
        }
        clusters[k].push(v);
    }
    let complete = clusters.len() > k_max_reliable && clusters.iter().enumerate().all(|(k, c)| c.len() == 2 * k + 1);
    complete.then_some(ClusteredSpectrum { clusters, k_max_reliable, provenance })
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| LabError::output(format!("{}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| LabError::output(format!("{}: {e}", dir.display())))?;
    tmp.write_all(bytes).and_then(|_| tmp.as_file().sync_all()).map_err(|e| LabError::output(format!("{}: {e}", path.display())))?;
    tmp.persist(path).map_err(|e| LabError::output(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

impl SpectrumCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        SpectrumCache { dir: dir.into() }
    }

    pub fn path(&self, key: &str, kind: SpectrumKind) -> PathBuf {
        self.dir.join(format!("{}-{}.txt", kind.name(), &key[..16]))
    }

    fn read(&self, key: &str, kind: SpectrumKind) -> Option<ClusteredSpectrum> {
        decode(&fs::read_to_string(self.path(key, kind)).ok()?, key)
    }

    /// Load the spectrum for `identity`, or compute and store it. Concurrent
    /// runs on the same key serialize on an exclusive lock file.
    pub fn get_or_compute<F>(&self, identity: &str, kind: SpectrumKind, compute: F) -> Result<(ClusteredSpectrum, Lookup), LabError>
    where
        F: FnOnce() -> Result<ClusteredSpectrum, LabError>,
    {
        let key = cache_key(identity, kind);
        if let Some(s) = self.read(&key, kind) {
            return Ok((s, Lookup::Hit));
        }
        fs::create_dir_all(&self.dir).map_err(|e| LabError::output(format!("{}: {e}", self.dir.display())))?;
        let lock_path = self.path(&key, kind).with_extension("lock");
        let lock = File::create(&lock_path).map_err(|e| LabError::output(format!("{}: {e}", lock_path.display())))?;
        lock.lock().map_err(|e| LabError::output(format!("{}: {e}", lock_path.display())))?;
        // another process may have filled the entry while we waited
        if let Some(s) = self.read(&key, kind) {
            return Ok((s, Lookup::Hit));
        }
        let spectrum = compute()?;
        write_atomic(&self.path(&key, kind), encode(&spectrum, &key).as_bytes())?;
        drop(lock);
        let _ = fs::remove_file(&lock_path);
        Ok((spectrum, Lookup::Miss))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ClusteredSpectrum {
        ClusteredSpectrum {
            clusters: vec![vec![0.1], vec![2.0 - 1e-3, 2.0, 2.0 + 1.0 / 3.0]],
            k_max_reliable: 1,
            provenance: "sphere-galerkin/L=8".into(),
        }
    }

    #[test]
    fn round_trips_bit_for_bit() {
        let key = cache_key("metric=round", SpectrumKind::Mu);
        let s = sample();
        let text = encode(&s, &key);
        assert_eq!(decode(&text, &key), Some(s.clone()));
        assert_eq!(encode(&decode(&text, &key).unwrap(), &key), text);
    }

    #[test]
    fn stale_or_damaged_entries_are_rejected() {
        let key = cache_key("metric=round", SpectrumKind::Mu);
        let text = encode(&sample(), &key);
        assert!(decode(&text, &cache_key("metric=round", SpectrumKind::Lambda)).is_none());
        assert!(decode(&text.replace("v1", "v0"), &key).is_none());
        let truncated: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(decode(&truncated, &key).is_none());
    }

    #[test]
    fn recomputes_only_on_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SpectrumCache::new(dir.path());
        let (_, first) = cache.get_or_compute("x", SpectrumKind::Mu, || Ok(sample())).unwrap();
        let (s, second) = cache.get_or_compute("x", SpectrumKind::Mu, || panic!("should be cached")).unwrap();
        assert_eq!((first, second), (Lookup::Miss, Lookup::Hit));
        assert_eq!(s, sample());
    }
}
