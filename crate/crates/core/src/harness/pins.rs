use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A run passes a pinned check when `measured <= PIN_FACTOR * pinned`.
pub const PIN_FACTOR: f64 = 1.1;

/// The regression file shipped with the crate.
pub fn default_pins_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("pins").join("regression.json")
}

/// Pinned empirical constants, keyed by quantity name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Pins {
    pub version: String,
    pub values: BTreeMap<String, f64>,
}

impl Pins {
    pub fn load(path: &Path) -> Result<Pins> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn load_or_empty(path: &Path) -> Result<Pins> {
        if path.exists() {
            Pins::load(path)
        } else {
            Ok(Pins::default())
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn merge(&mut self, measured: &BTreeMap<String, f64>) {
        self.version = env!("CARGO_PKG_VERSION").to_string();
        for (k, v) in measured {
            self.values.insert(k.clone(), *v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_merge() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p").join("pins.json");
        let mut p = Pins::load_or_empty(&path).unwrap();
        assert!(p.values.is_empty());
        p.merge(&BTreeMap::from([("a".to_string(), 1.5)]));
        p.save(&path).unwrap();
        let back = Pins::load(&path).unwrap();
        assert_eq!(back.get("a"), Some(1.5));
        assert_eq!(back.get("b"), None);
    }
}
