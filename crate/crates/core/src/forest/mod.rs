//! Random-forest regression built from CART trees.
//!
//! Each tree is fit on a bootstrap resample with its own ChaCha stream
//! (`seed`, stream = tree index), so a forest does not depend on how rayon
//! schedules the trees.

mod ablation;
mod tree;

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use ablation::{component_groups, importance_by_ablation, AblationRow, LabeledMatrix};
pub use tree::{best_split, fit_tree, improves, Node, RegressionTree, SplitChoice, MIN_GAIN, TIE_TOLERANCE};

use crate::eval::{EvalError, HardnessPredictor};
use crate::features::{FeatureExtractor, FeatureSchema};
use crate::schema::SchemaHalf;

pub const MODEL_MAGIC: &str = "HARDNESS-FOREST";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ForestError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite input at row {row}{}", .column.map(|c| format!(", column {c}")).unwrap_or_default())]
    NonFinite { row: usize, column: Option<usize> },
    #[error("no training rows")]
    Empty,
    #[error("invalid hyperparameters: {0}")]
    Hyperparams(String),
    #[error("model file format error: {0}")]
    Format(String),
    #[error("model file version {found}, this build reads version {expected}")]
    Version { found: u32, expected: u32 },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown ablation group or column `{0}`")]
    UnknownGroup(String),
    #[error("no ablation groups given")]
    NoGroups,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// How many features each split considers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSampling {
    All,
    /// ⌈p/3⌉, counted over the features that vary at the node
    Third,
    Count(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestHyperparams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: FeatureSampling,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestHyperparams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 2,
            features_per_split: FeatureSampling::Third,
            bootstrap: true,
            seed: 42,
        }
    }
}

impl ForestHyperparams {
    /// A single unrandomised CART tree.
    pub fn single_tree() -> Self {
        Self {
            n_trees: 1,
            features_per_split: FeatureSampling::All,
            bootstrap: false,
            ..Self::default()
        }
    }

    pub fn validate(&self, p: usize) -> Result<(), ForestError> {
        let bad = |m: String| Err(ForestError::Hyperparams(m));
        if self.n_trees == 0 {
            return bad("n_trees must be at least 1".into());
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be at least 1".into());
        }
        if self.max_depth == Some(0) {
            return bad("max_depth must be at least 1".into());
        }
        if p == 0 {
            return bad("no feature columns".into());
        }
        if let FeatureSampling::Count(m) = self.features_per_split {
            if m == 0 || m > p {
                return bad(format!("features_per_split {m} outside 1..={p}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub n_samples: usize,
    pub n_features: usize,
    pub target_min: f64,
    pub target_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub hyperparams: ForestHyperparams,
    pub columns: Vec<String>,
    /// category codes used to encode the training features, when trained on
    /// feature vectors
    pub schema: Option<FeatureSchema>,
    pub meta: TrainingMeta,
    trees: Vec<RegressionTree>,
}

/// Fits a forest on the rows of `x`. Columns are named `x0`, `x1`, ...
pub fn fit_forest(x: &[Vec<f64>], y: &[f64], hp: &ForestHyperparams) -> Result<ForestModel, ForestError> {
    let p = tree::check_inputs(x, y)?;
    hp.validate(p)?;
    let n = x.len();
    let trees = (0..hp.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
            rng.set_stream(t as u64);
            let idx: Vec<usize> = if hp.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            RegressionTree::fit_indices(x, y, &idx, hp, &mut rng)
        })
        .collect();
    Ok(ForestModel {
        hyperparams: hp.clone(),
        columns: (0..p).map(|j| format!("x{j}")).collect(),
        schema: None,
        meta: TrainingMeta {
            n_samples: n,
            n_features: p,
            target_min: y.iter().copied().fold(f64::INFINITY, f64::min),
            target_max: y.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        },
        trees,
    })
}

impl ForestModel {
    pub fn with_columns(mut self, columns: Vec<String>) -> Result<Self, ForestError> {
        if columns.len() != self.meta.n_features {
            return Err(ForestError::DimensionMismatch(format!(
                "{} column names for {} features",
                columns.len(),
                self.meta.n_features
            )));
        }
        self.columns = columns;
        Ok(self)
    }

    pub fn with_schema(mut self, schema: FeatureSchema) -> Self {
        self.schema = Some(schema);
        self
    }

    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }

    /// Mean of the tree predictions.
    pub fn predict(&self, row: &[f64]) -> Result<f64, ForestError> {
        if row.len() != self.meta.n_features {
            return Err(ForestError::DimensionMismatch(format!(
                "vector has {} values, model expects {}",
                row.len(),
                self.meta.n_features
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(ForestError::NonFinite { row: 0, column: row.iter().position(|v| !v.is_finite()) });
        }
        Ok(self.trees.iter().map(|t| t.predict(row)).sum::<f64>() / self.trees.len() as f64)
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>, ForestError> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let body = serde_json::to_string(self).expect("model serializes");
        format!("{MODEL_MAGIC}\nversion {MODEL_VERSION}\n{body}\n").into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ForestError> {
        let text = std::str::from_utf8(bytes).map_err(|_| ForestError::Format("not UTF-8".into()))?;
        let mut parts = text.splitn(3, '\n');
        if parts.next() != Some(MODEL_MAGIC) {
            return Err(ForestError::Format("missing magic header".into()));
        }
        let found = parts
            .next()
            .and_then(|l| l.strip_prefix("version "))
            .and_then(|v| v.trim().parse::<u32>().ok())
            .ok_or_else(|| ForestError::Format("missing version line".into()))?;
        if found != MODEL_VERSION {
            return Err(ForestError::Version {
                found,
                expected: MODEL_VERSION,
            });
        }
        let model: Self = serde_json::from_str(parts.next().unwrap_or(""))
            .map_err(|e| ForestError::Format(e.to_string()))?;
        model.check()?;
        Ok(model)
    }

    fn check(&self) -> Result<(), ForestError> {
        if self.trees.is_empty() || self.columns.len() != self.meta.n_features {
            return Err(ForestError::Format("inconsistent model header".into()));
        }
        for t in &self.trees {
            if t.n_features() != self.meta.n_features {
                return Err(ForestError::Format("tree width differs from the model".into()));
            }
            t.check_structure().map_err(ForestError::Format)?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ForestError> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|source| ForestError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ForestError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| ForestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_bytes(&bytes)
    }
}

/// Forest over extracted feature vectors.
pub struct FeaturePredictor<'a> {
    pub model: &'a ForestModel,
    pub extractor: &'a FeatureExtractor,
}

impl HardnessPredictor for FeaturePredictor<'_> {
    fn name(&self) -> String {
        "random forest".into()
    }

    fn predict_half(&self, half: &SchemaHalf) -> Result<f64, EvalError> {
        let schema = self.model.schema.clone().unwrap_or_default();
        let row = schema.encode_numeric(&self.extractor.extract(half));
        self.model.predict(&row).map_err(|e| EvalError::Predict {
            id: half.id.clone(),
            message: e.to_string(),
        })
    }
}
