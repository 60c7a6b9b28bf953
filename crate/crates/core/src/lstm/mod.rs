//! LSTM regressor over the lemmatised sentence of a half.

mod gradcheck;
mod io;
mod model;
mod train;

use std::collections::HashMap;

pub use gradcheck::{gradient_check, gradient_check_with, GradCheck};
pub use io::{LSTM_MAGIC, LSTM_VERSION};
pub use model::{LstmModel, Layout, Masks, ParamGroup, Shape, DROPOUT, EMBED_DIM, HIDDEN_UNITS};
pub use train::{train, validation_split_sizes, EpochStats, TrainConfig, TrainHistory};

use crate::eval::{EvalError, HardnessPredictor};
use crate::schema::SchemaHalf;
use crate::text::preprocess_sequence;

/// Encoded sequence length.
pub const MAX_LEN: usize = 50;

#[derive(Debug, thiserror::Error)]
pub enum LstmError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("no training samples")]
    EmptyDataset,
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("non-finite loss at epoch {epoch}, batch {batch}: {detail}")]
    NonFinite { epoch: usize, batch: usize, detail: String },
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
}

/// Lemma → id map. Ids start at 1 in first-occurrence order; 0 is padding
/// and unknown.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn from_words(words: Vec<String>) -> Result<Self, LstmError> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i as u32 + 1).is_some() {
                return Err(LstmError::Format(format!("duplicate vocabulary entry `{w}`")));
            }
        }
        Ok(Self { words, index })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn id(&self, lemma: &str) -> u32 {
        self.index.get(lemma).copied().unwrap_or(0)
    }
}

pub fn build_vocabulary<S: AsRef<str>>(sentences: &[Vec<S>]) -> Vocabulary {
    let mut v = Vocabulary::default();
    for s in sentences {
        for w in s {
            let w = w.as_ref();
            if !v.index.contains_key(w) {
                v.words.push(w.to_string());
                v.index.insert(w.to_string(), v.words.len() as u32);
            }
        }
    }
    v
}

/// Ids of the first [`MAX_LEN`] lemmas, padded with zeros.
pub fn encode<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> Vec<u32> {
    let mut ids: Vec<u32> = tokens.iter().take(MAX_LEN).map(|t| vocab.id(t.as_ref())).collect();
    ids.resize(MAX_LEN, 0);
    ids
}

/// Preprocessed, encoded sentence of a half.
pub fn encode_half(half: &SchemaHalf, vocab: &Vocabulary) -> Vec<u32> {
    encode(&preprocess_sequence(&half.sentence), vocab)
}

impl LstmModel {
    /// Builds the vocabulary from `halves`, initialises a model with `seed`
    /// and trains it on the labelled halves.
    pub fn fit_halves(halves: &[SchemaHalf], cfg: &TrainConfig) -> Result<(Self, TrainHistory), LstmError> {
        let lemmas: Vec<Vec<String>> = halves.iter().map(|h| preprocess_sequence(&h.sentence)).collect();
        let vocab = build_vocabulary(&lemmas);
        let data: Vec<(Vec<u32>, f64)> = halves
            .iter()
            .zip(&lemmas)
            .filter_map(|(h, l)| h.hardness.map(|y| (encode(l, &vocab), y)))
            .collect();
        let mut model = Self::new(vocab, cfg.seed);
        let history = train(&mut model, &data, cfg)?;
        Ok((model, history))
    }

    pub fn predict_half(&self, half: &SchemaHalf) -> Result<f64, LstmError> {
        self.predict_hardness(&encode_half(half, &self.vocab))
    }
}

impl HardnessPredictor for LstmModel {
    fn name(&self) -> String {
        "LSTM".into()
    }

    fn predict_half(&self, half: &SchemaHalf) -> Result<f64, EvalError> {
        LstmModel::predict_half(self, half).map_err(|e| EvalError::Predict {
            id: half.id.clone(),
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn vocabulary_first_occurrence() {
        let corpus = [v(&["cat", "catch", "mouse"]), v(&["mouse", "clever", "cat"])];
        let vocab = build_vocabulary(&corpus);
        assert_eq!(vocab.words(), ["cat", "catch", "mouse", "clever"]);
        assert_eq!(vocab.id("mouse"), 3);
        assert_eq!(vocab.id("dog"), 0);
        let twice: Vec<Vec<String>> = corpus.iter().chain(&corpus).cloned().collect();
        assert_eq!(build_vocabulary(&twice), vocab);
        assert!(build_vocabulary::<String>(&[]).is_empty());
    }

    #[test]
    fn encoding_pads_and_truncates() {
        let vocab = build_vocabulary(&[v(&["cat", "catch", "mouse", "clever"])]);
        let e = encode(&["cat", "catch", "mouse", "clever"], &vocab);
        assert_eq!(e.len(), MAX_LEN);
        assert_eq!(&e[..4], &[1, 2, 3, 4]);
        assert!(e[4..].iter().all(|&x| x == 0));
        let long: Vec<String> = (0..60).map(|i| if i % 2 == 0 { "cat".into() } else { "mouse".into() }).collect();
        let e = encode(&long, &vocab);
        assert_eq!(e.len(), MAX_LEN);
        assert_eq!(e[49], 3);
        assert!(encode(&["x", "y"], &vocab).iter().all(|&x| x == 0));
    }

    proptest! {
        #[test]
        fn ids_in_range(words in prop::collection::vec("[a-e]{1,2}", 0..80)) {
            let vocab = build_vocabulary(&[words[..words.len() / 2].to_vec()]);
            let e = encode(&words, &vocab);
            prop_assert_eq!(e.len(), MAX_LEN);
            prop_assert!(e.iter().all(|&id| (id as usize) <= vocab.len()));
        }
    }
}
