//! key=value config files for `train`; command-line flags take precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};

use crate::TrainMode;

pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "corpus",
    "c",
    "mode",
    "k",
    "alpha",
    "eta",
    "batch_size",
    "kappa",
    "tau0",
    "reg_iter",
    "passes",
    "epochs",
    "tol",
    "seed",
    "threads",
    "epoch_sampling",
    "model_out",
    "metrics_out",
];

impl ConfigFile {
    pub fn empty() -> Self {
        ConfigFile {
            values: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("{}:{}: expected key=value, got {line:?}", path.display(), i + 1);
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                bail!("{}:{}: unknown config key {key:?}", path.display(), i + 1);
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key {key} = {raw:?}: {e}")),
        }
    }

    pub fn get_path(&self, key: &str) -> Option<PathBuf> {
        self.values.get(key).map(PathBuf::from)
    }

    pub fn get_mode(&self) -> anyhow::Result<Option<TrainMode>> {
        match self.values.get("mode").map(String::as_str) {
            None => Ok(None),
            Some("standard-batch") => Ok(Some(TrainMode::StandardBatch)),
            Some("standard-online") => Ok(Some(TrainMode::StandardOnline)),
            Some("reg-batch") => Ok(Some(TrainMode::RegBatch)),
            Some("reg-online") => Ok(Some(TrainMode::RegOnline)),
            Some(other) => bail!("config key mode = {other:?} is not a training mode"),
        }
    }

    pub fn get_flag(&self, key: &str) -> anyhow::Result<bool> {
        match self.values.get(key).map(String::as_str) {
            None => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(other) => bail!("config key {key} = {other:?} is not a boolean"),
        }
    }
}
