//! Run configuration: defaults, then a `key = value` file, then environment
//! variables, then command-line flags.
//!
//! ```text
//! # comments start with '#'
//! resources = fixtures/resources
//! network = false
//! seed = 7
//! threshold = 0.2
//! n_trees = 100
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::features::ExtractionConfig;
use crate::forest::{FeatureSampling, ForestHyperparams};
use crate::lstm::TrainConfig;
use crate::resources::HitConfig;

pub const ENV_RESOURCES: &str = "HARDNESS_RESOURCES";
pub const ENV_NETWORK: &str = "HARDNESS_NETWORK";
pub const ENV_HIT_ENDPOINT: &str = "HARDNESS_HIT_ENDPOINT";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: `{value}`")]
    Value { key: String, value: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub resources: Option<PathBuf>,
    pub network: bool,
    pub hit_endpoint: Option<String>,
    pub hit_timeout_secs: u64,
    pub seed: u64,
    pub threshold: f64,
    pub min_connective_count: u64,
    pub chain_fallback: bool,
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub validation_fraction: f64,
}

impl Default for CliConfig {
    fn default() -> Self {
        let ex = ExtractionConfig::default();
        let hp = ForestHyperparams::default();
        let tc = TrainConfig::default();
        Self {
            resources: None,
            network: false,
            hit_endpoint: None,
            hit_timeout_secs: 10,
            seed: 42,
            threshold: ex.threshold,
            min_connective_count: ex.min_connective_count,
            chain_fallback: ex.chain_fallback,
            n_trees: hp.n_trees,
            max_depth: hp.max_depth,
            min_samples_leaf: hp.min_samples_leaf,
            features_per_split: None,
            bootstrap: hp.bootstrap,
            epochs: tc.epochs,
            batch_size: tc.batch_size,
            learning_rate: tc.learning_rate,
            validation_fraction: tc.validation_fraction,
        }
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Some(true),
        "0" | "false" | "no" | "off" => Some(false),
        _ => None,
    }
}

impl CliConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::Value {
            key: key.to_string(),
            value: value.to_string(),
        };
        fn num<T: std::str::FromStr>(v: &str, bad: impl Fn() -> ConfigError) -> Result<T, ConfigError> {
            v.parse().map_err(|_| bad())
        }
        let optional = |v: &str| -> Result<Option<usize>, ConfigError> {
            match v {
                "" | "none" | "unlimited" => Ok(None),
                _ => num(v, bad).map(Some),
            }
        };
        match key {
            "resources" => self.resources = (!value.is_empty()).then(|| PathBuf::from(value)),
            "network" => self.network = parse_bool(value).ok_or_else(bad)?,
            "hit_endpoint" => self.hit_endpoint = (!value.is_empty()).then(|| value.to_string()),
            "hit_timeout_secs" => self.hit_timeout_secs = num(value, bad)?,
            "seed" => self.seed = num(value, bad)?,
            "threshold" => self.threshold = num(value, bad)?,
            "min_connective_count" => self.min_connective_count = num(value, bad)?,
            "chain_fallback" => self.chain_fallback = parse_bool(value).ok_or_else(bad)?,
            "n_trees" => self.n_trees = num(value, bad)?,
            "max_depth" => self.max_depth = optional(value)?,
            "min_samples_leaf" => self.min_samples_leaf = num(value, bad)?,
            "features_per_split" => self.features_per_split = optional(value)?,
            "bootstrap" => self.bootstrap = parse_bool(value).ok_or_else(bad)?,
            "epochs" => self.epochs = num(value, bad)?,
            "batch_size" => self.batch_size = num(value, bad)?,
            "learning_rate" => self.learning_rate = num(value, bad)?,
            "validation_fraction" => self.validation_fraction = num(value, bad)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: i + 1,
                message: "expected `key = value`".into(),
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.merge_text(&text)
    }

    /// Applies the `HARDNESS_*` variables found by `lookup`.
    pub fn merge_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        for (var, key) in [(ENV_RESOURCES, "resources"), (ENV_NETWORK, "network"), (ENV_HIT_ENDPOINT, "hit_endpoint")] {
            if let Some(v) = lookup(var) {
                self.set(key, v.trim())?;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.extraction_config()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.n_trees == 0 || self.min_samples_leaf == 0 || self.max_depth == Some(0) || self.features_per_split == Some(0) {
            return Err(ConfigError::Invalid("forest sizes must be at least 1".into()));
        }
        self.train_config().validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.network && self.hit_endpoint.is_none() {
            return Err(ConfigError::Invalid("network enabled without a hit endpoint".into()));
        }
        if let Some(r) = &self.resources {
            if !r.is_dir() {
                return Err(ConfigError::Invalid(format!("resource directory {} not found", r.display())));
            }
        }
        Ok(())
    }

    pub fn extraction_config(&self) -> ExtractionConfig {
        ExtractionConfig {
            threshold: self.threshold,
            min_connective_count: self.min_connective_count,
            network_enabled: self.network,
            resources_dir: self.resources.clone(),
            chain_fallback: self.chain_fallback,
            ..ExtractionConfig::default()
        }
    }

    pub fn hit_config(&self) -> HitConfig {
        HitConfig {
            network_enabled: self.network,
            endpoint: self.hit_endpoint.clone(),
            timeout: Duration::from_secs(self.hit_timeout_secs),
        }
    }

    pub fn forest_hyperparams(&self) -> ForestHyperparams {
        ForestHyperparams {
            n_trees: self.n_trees,
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
            features_per_split: self.features_per_split.map_or(FeatureSampling::Third, FeatureSampling::Count),
            bootstrap: self.bootstrap,
            seed: self.seed,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            validation_fraction: self.validation_fraction,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }
}
