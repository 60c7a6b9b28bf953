//! Deterministic linguistic layer: tokenization and tagging, clause
//! segmentation, semantic triples, negation and sequence preprocessing.
//!
//! Everything here is rule-based and driven by bundled word lists, so output
//! is identical across runs and platforms. Externally produced parses can be
//! plugged in through [`HalfAnnotation`].

mod clauses;
pub mod lexicon;
mod tokenize;
mod triples;

use serde::{Deserialize, Serialize};

pub(crate) use clauses::classify_tokens;
pub(crate) use triples::triples_for_tokens;
pub use clauses::{classify_sentence, segment_clauses, Clause, SentenceShape, SentenceType};
pub use lexicon::{lemmatize, ConnectiveKind};
pub use tokenize::tokenize;
pub use triples::{
    detect_negation, extract_triples, parse_annotations, tag_with, HalfAnnotation, NegationScope,
    ParseAnnotations, SemanticTriple, TextAnnotation, TripleKind, TripleRef,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TextError {
    #[error("empty text")]
    EmptyText,
    #[error("no verb found in `{0}`")]
    NoVerbFound(String),
    #[error("invalid parse annotation: {0}")]
    InvalidAnnotation(String),
    #[error("undetermined: {0}")]
    Undetermined(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pos {
    Noun,
    Verb,
    AuxVerb,
    Adj,
    Pronoun,
    Det,
    ConjSub,
    ConjCoord,
    Other,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
    pub index: usize,
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.pos != Pos::Punct
    }

    pub fn is_verbal(&self) -> bool {
        matches!(self.pos, Pos::Verb | Pos::AuxVerb)
    }

    pub fn lower(&self) -> String {
        self.surface.to_lowercase()
    }
}

/// Lemmas of the non-stop-word tokens of `sentence`, in order. Empty input
/// gives an empty sequence.
pub fn preprocess_sequence(sentence: &str) -> Vec<String> {
    let Ok(tokens) = tokenize(sentence) else {
        return Vec::new();
    };
    let lex = lexicon::lexicon();
    tokens
        .iter()
        .filter(|t| t.is_word() && !lex.is_stop_word(&t.lower()))
        .map(|t| t.lemma.to_lowercase())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn preprocess_examples() {
        assert_eq!(
            preprocess_sequence("The cat caught the mouse because it was clever."),
            ["cat", "catch", "mouse", "clever"]
        );
        assert!(preprocess_sequence("The the the.").is_empty());
        assert_eq!(
            preprocess_sequence("Demonstrators advocated violence"),
            ["demonstrator", "advocate", "violence"]
        );
        assert!(preprocess_sequence("").is_empty());
    }

    proptest! {
        #[test]
        fn tokenize_is_deterministic_and_indexed(s in "[A-Za-z ,.']{1,60}") {
            if let Ok(a) = tokenize(&s) {
                let b = tokenize(&s).unwrap();
                prop_assert_eq!(&a, &b);
                for (i, t) in a.iter().enumerate() {
                    prop_assert_eq!(t.index, i);
                    prop_assert!(!t.lemma.is_empty());
                }
            }
        }

        #[test]
        fn preprocess_is_subsequence_of_lemmas(s in "[a-z ]{1,60}") {
            let out = preprocess_sequence(&s);
            let lemmas: Vec<String> = tokenize(&s)
                .map(|t| t.into_iter().filter(Token::is_word).map(|t| t.lemma.to_lowercase()).collect())
                .unwrap_or_default();
            let mut it = lemmas.iter();
            for w in &out {
                prop_assert!(it.any(|l| l == w));
            }
        }
    }
}
