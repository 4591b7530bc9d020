//! Optional on-disk cache of sampled Poisson configurations.

use std::path::PathBuf;

use mstperc::geometry::{sample_poisson, Configuration, Cube};

use crate::error::LabResult;
use crate::output::atomic_write;

/// Directory override; caching is off when unset.
pub const CACHE_ENV: &str = "MSTLAB_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Self::new)
    }

    fn path_for(&self, domain: &Cube<f64>, intensity: f64, seed: u64) -> PathBuf {
        let mut key = format!("poisson-d{}-h{:016x}-i{:016x}-s{seed:016x}", domain.dim(), domain.half_width.to_bits(), intensity.to_bits());
        for c in &domain.center.coords {
            key.push_str(&format!("-c{:016x}", c.to_bits()));
        }
        self.dir.join(key + ".bin")
    }

    /// The configuration `sample_poisson(domain, intensity, seed)`, read from
    /// the cache when present and stored otherwise.
    pub fn poisson(&self, domain: &Cube<f64>, intensity: f64, seed: u64) -> LabResult<Configuration<f64>> {
        let path = self.path_for(domain, intensity, seed);
        if let Ok(bytes) = std::fs::read(&path) {
            if let Ok(c) = Configuration::read_binary(&bytes[..]) {
                return Ok(c);
            }
        }
        let c = sample_poisson(domain, intensity, seed)?;
        std::fs::create_dir_all(&self.dir)?;
        let mut buf = Vec::new();
        c.write_binary(&mut buf)?;
        atomic_write(&path, &buf)?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cached_sample_equals_fresh_sample() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let dom = Cube::centered(2, 3.0).unwrap();
        let a = cache.poisson(&dom, 1.0, 5).unwrap();
        let b = cache.poisson(&dom, 1.0, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, sample_poisson(&dom, 1.0, 5).unwrap());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
