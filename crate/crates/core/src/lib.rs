//! Hardness estimation for Winograd schema halves.
//!
//! A schema half (sentence, question, two candidate referents) is mapped to a
//! hardness index in `[0, 1]`: the fraction of human readers expected to
//! resolve its pronoun correctly. Two interchangeable regressors are provided:
//!
//! * [`forest`]: a random forest over 47 hand-engineered linguistic and
//!   knowledge features produced by [`features`];
//! * [`lstm`]: an LSTM sequence regressor over the lemmatised sentence.
//!
//! All external knowledge (corpus statistics, polarity lexicons, narrative
//! chains, relatedness scores, frame roles, search hit counts) is read from
//! plain files through [`resources`], so every run is reproducible offline.
//!
//! The `examples/` directory of this crate has one runnable program per major
//! capability; run them with `cargo run --example <name>`.

pub mod cli;
pub mod config;
pub mod eval;
pub mod features;
pub mod forest;
pub mod lstm;
pub mod resources;
pub mod schema;
pub mod synthetic;
pub mod text;

pub use eval::{EvaluationReport, HardnessPredictor, TimingReport};
pub use features::{ExtractionConfig, FeatureExtractor, FeatureVector};
pub use forest::{ForestHyperparams, ForestModel};
pub use lstm::{LstmModel, TrainConfig};
pub use resources::Resources;
pub use schema::{Dataset, SchemaHalf};

/// Crate-level error, one variant per subsystem.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Dataset(#[from] schema::DatasetError),
    #[error(transparent)]
    Text(#[from] text::TextError),
    #[error(transparent)]
    Resource(#[from] resources::ResourceError),
    #[error(transparent)]
    Feature(#[from] features::FeatureError),
    #[error(transparent)]
    Forest(#[from] forest::ForestError),
    #[error(transparent)]
    Lstm(#[from] lstm::LstmError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
