//! Matched-MT distributions, built once per key and kept on disk.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::chaos::ChaoticMapKind;
use crate::normalize::Scheme;
use crate::source::{build_empirical_distribution, ChaoticSource, EmpiricalDistribution};
use crate::{Error, Result};

pub const CACHE_ENV: &str = "CHAOSDE_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionKey {
    pub map: ChaoticMapKind,
    pub scheme: Scheme,
    pub samples: usize,
    pub bins: usize,
    /// 0 builds from the map's default start point; anything else perturbs
    /// the start point with the jitter of repetition 0 under this seed.
    pub build_seed: u64,
}

impl DistributionKey {
    pub fn new(map: ChaoticMapKind, scheme: Scheme, samples: usize, bins: usize) -> Self {
        DistributionKey {
            map,
            scheme,
            samples,
            bins,
            build_seed: 0,
        }
    }

    /// File name under the cache directory. Non-default Tinkerbell
    /// parameters are folded in so they never collide with the defaults.
    pub fn file_name(&self) -> String {
        let map = match self.map {
            ChaoticMapKind::Tinkerbell(q) if q != Default::default() => {
                format!("tinkerbell-{:016x}", [q.a, q.b, q.c, q.d].iter().fold(0u64, |h, v| {
                    (h ^ v.to_bits()).wrapping_mul(0x0000_0100_0000_01b3)
                }))
            }
            m => m.name().to_string(),
        };
        format!("{map}-{}-n{}-b{}-s{}.json", self.scheme, self.samples, self.bins, self.build_seed)
    }

    pub fn build(&self) -> Result<EmpiricalDistribution> {
        let p0 = if self.build_seed == 0 {
            self.map.default_initial_point()
        } else {
            super::jittered_start(self.map, self.build_seed, 0, super::DEFAULT_JITTER)
        };
        let mut src = ChaoticSource::with_scheme(self.map, p0, self.scheme)?;
        build_empirical_distribution(&mut src, self.samples, self.bins)
    }
}

/// `$CHAOSDE_CACHE_DIR`, else `$XDG_CACHE_HOME/chaosde`, else
/// `~/.cache/chaosde`, else a directory under the system temp dir.
pub fn default_cache_dir() -> PathBuf {
    let env = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
    env(CACHE_ENV)
        .or_else(|| env("XDG_CACHE_HOME").map(|p| p.join("chaosde")))
        .or_else(|| env("HOME").map(|p| p.join(".cache").join("chaosde")))
        .unwrap_or_else(|| std::env::temp_dir().join("chaosde"))
}

/// In-memory map in front of an optional directory of JSON files.
#[derive(Debug, Default)]
pub struct DistributionCache {
    dir: Option<PathBuf>,
    entries: Mutex<HashMap<String, Arc<EmpiricalDistribution>>>,
}

impl DistributionCache {
    pub fn in_memory() -> Self {
        DistributionCache::default()
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        DistributionCache {
            dir: Some(dir.into()),
            entries: Mutex::default(),
        }
    }

    pub fn from_env() -> Self {
        DistributionCache::at(default_cache_dir())
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn get(&self, key: DistributionKey) -> Result<Arc<EmpiricalDistribution>> {
        let name = key.file_name();
        if let Some(d) = self.entries.lock().expect("cache lock poisoned").get(&name) {
            return Ok(Arc::clone(d));
        }
        let dist = Arc::new(match self.load(&name, &key) {
            Some(d) => d,
            None => {
                let d = key.build()?;
                self.store(&name, &d)?;
                d
            }
        });
        let mut entries = self.entries.lock().expect("cache lock poisoned");
        Ok(Arc::clone(entries.entry(name).or_insert(dist)))
    }

    /// A missing or unreadable file is treated as a miss and rebuilt.
    fn load(&self, name: &str, key: &DistributionKey) -> Option<EmpiricalDistribution> {
        let path = self.dir.as_ref()?.join(name);
        let text = std::fs::read_to_string(path).ok()?;
        let d: EmpiricalDistribution = serde_json::from_str(&text).ok()?;
        let valid = d.bins() == key.bins
            && d.sample_count() == key.samples as u64
            && EmpiricalDistribution::from_counts(d.counts().to_vec()).ok()? == d;
        valid.then_some(d)
    }

    fn store(&self, name: &str, d: &EmpiricalDistribution) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        // write-then-rename so concurrent readers never see a partial file
        let tmp = dir.join(format!("{name}.{}.tmp", std::process::id()));
        std::fs::write(&tmp, serde_json::to_vec(d)?).map_err(|e| Error::io(&tmp, e))?;
        let path = dir.join(name);
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key() -> DistributionKey {
        DistributionKey::new(ChaoticMapKind::Gingerbread, Scheme::Modulo, 100_000, 32)
    }

    #[test]
    fn disk_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = DistributionCache::at(dir.path()).get(key()).unwrap();
        let file = dir.path().join(key().file_name());
        assert!(file.exists());
        let b = DistributionCache::at(dir.path()).get(key()).unwrap();
        assert_eq!(a, b);
        assert_eq!(*a, key().build().unwrap());
    }

    #[test]
    fn corrupt_file_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(key().file_name()), "{not json").unwrap();
        let d = DistributionCache::at(dir.path()).get(key()).unwrap();
        assert_eq!(d.sample_count(), 100_000);
    }

    #[test]
    fn keys_name_distinct_files() {
        let mut k2 = key();
        k2.build_seed = 9;
        let mut k3 = key();
        k3.map = ChaoticMapKind::tinkerbell();
        let mut k4 = k3;
        if let ChaoticMapKind::Tinkerbell(q) = &mut k4.map {
            q.a = 0.3;
        }
        let names = [key().file_name(), k2.file_name(), k3.file_name(), k4.file_name()];
        for i in 0..names.len() {
            for j in 0..i {
                assert_ne!(names[i], names[j]);
            }
        }
    }
}
