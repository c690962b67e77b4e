use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mc_distances, DistanceEstimate};
use crate::error::{Error, Result};

/// Memo of Monte Carlo estimates keyed by `(c, samples, seed)`, persisted as
/// JSON so sweeps can reuse earlier runs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DistanceCache {
    entries: BTreeMap<String, DistanceEstimate>,
    #[serde(skip)]
    dirty: bool,
}

fn key(c: usize, samples: usize, seed: u64) -> String {
    format!("{c}:{samples}:{seed}")
}

impl DistanceCache {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Ok(Self::default());
        }
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("cache serializes");
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get_or_compute(&mut self, c: usize, samples: usize, seed: u64) -> Result<DistanceEstimate> {
        let k = key(c, samples, seed);
        if let Some(e) = self.entries.get(&k) {
            return Ok(*e);
        }
        let e = mc_distances(c, samples, seed)?;
        self.entries.insert(k, e);
        self.dirty = true;
        Ok(e)
    }

    /// Estimates for `c = 1..=c_max`.
    pub fn curve(&mut self, c_max: usize, samples: usize, seed: u64) -> Result<Vec<DistanceEstimate>> {
        let missing: Vec<usize> = (1..=c_max).filter(|&c| !self.entries.contains_key(&key(c, samples, seed))).collect();
        let fresh: Vec<DistanceEstimate> =
            missing.par_iter().map(|&c| mc_distances(c, samples, seed)).collect::<Result<_>>()?;
        for (c, e) in missing.into_iter().zip(fresh) {
            self.entries.insert(key(c, samples, seed), e);
            self.dirty = true;
        }
        (1..=c_max).map(|c| self.get_or_compute(c, samples, seed)).collect()
    }
}
