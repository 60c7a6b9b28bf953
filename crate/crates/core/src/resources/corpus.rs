//! Frequency index over a plain-text corpus: how often a lemma appears as a
//! subject or object, and how often a verb is bridged to a following clause's
//! governing word by a connective.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use super::{stem, ResourceError};
use crate::text::{self, Pos, SemanticTriple, TextError, Token};

pub const INDEX_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Subject,
    Object,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Subject => "subject",
            Role::Object => "object",
        }
    }

    /// Chain-file marker (`s` / `o`).
    pub fn marker(self) -> char {
        match self {
            Role::Subject => 's',
            Role::Object => 'o',
        }
    }
}

/// Produces triples for one corpus sentence.
pub trait TripleExtractor: Sync {
    fn extract(&self, tokens: &[Token]) -> Result<Vec<SemanticTriple>, TextError>;
}

/// The built-in rule-based extractor.
#[derive(Debug, Default, Clone, Copy)]
pub struct RuleExtractor;

impl TripleExtractor for RuleExtractor {
    fn extract(&self, tokens: &[Token]) -> Result<Vec<SemanticTriple>, TextError> {
        text::triples_for_tokens(tokens, None)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusIndex {
    role_counts: BTreeMap<(String, Role), u64>,
    connective_triple_counts: BTreeMap<(String, String, String), u64>,
    doc_count: u64,
}

#[derive(Serialize, Deserialize)]
struct IndexDump {
    version: u32,
    doc_count: u64,
    role_counts: Vec<(String, Role, u64)>,
    connective_triple_counts: Vec<(String, String, String, u64)>,
}

/// Word a clause's event hinges on: the complement adjective of a copula,
/// otherwise the verb itself.
pub fn governor(triple: &SemanticTriple) -> &Token {
    match &triple.object {
        Some(o) if triple.verb.pos == Pos::AuxVerb && o.pos == Pos::Adj => o,
        _ => &triple.verb,
    }
}

impl CorpusIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn doc_count(&self) -> u64 {
        self.doc_count
    }

    pub fn role_frequency(&self, lemma: &str, role: Role) -> u64 {
        self.role_counts
            .get(&(lemma.to_string(), role))
            .copied()
            .unwrap_or(0)
    }

    /// Count of `(v, cn, x)`; `x` is stemmed here, so callers pass lemmas.
    pub fn connective_triple_frequency(&self, v: &str, cn: &str, x: &str) -> u64 {
        self.connective_triple_counts
            .get(&(v.to_string(), cn.to_string(), stem(x)))
            .copied()
            .unwrap_or(0)
    }

    /// Adds the counts of one sentence. Sentences without a verb still count
    /// as documents but contribute nothing else.
    pub fn add_sentence(&mut self, sentence: &str, extractor: &dyn TripleExtractor) {
        let Ok(tokens) = text::tokenize(sentence) else {
            return;
        };
        self.doc_count += 1;
        let Ok(triples) = extractor.extract(&tokens) else {
            return;
        };
        for t in triples.iter().filter(|t| t.is_relation()) {
            for (tok, role) in [(&t.subject, Role::Subject), (&t.object, Role::Object)] {
                if let Some(tok) = tok.as_ref().filter(|x| matches!(x.pos, Pos::Noun | Pos::Pronoun)) {
                    *self.role_counts.entry((tok.lemma.to_lowercase(), role)).or_default() += 1;
                }
            }
        }
        let clauses = text::segment_clauses(&tokens);
        for (ci, clause) in clauses.iter().enumerate().skip(1) {
            let Some(cn) = clause.connective else { continue };
            let head = |c: usize| triples.iter().find(|t| t.is_relation() && t.clause == c);
            if let (Some(prev), Some(cur)) = (head(ci - 1), head(ci)) {
                let key = (
                    prev.verb.lemma.to_lowercase(),
                    tokens[cn].lower(),
                    stem(&governor(cur).lemma.to_lowercase()),
                );
                *self.connective_triple_counts.entry(key).or_default() += 1;
            }
        }
    }

    /// Builds an index from one-sentence-per-line text.
    pub fn build<R: BufRead>(corpus: R, extractor: &dyn TripleExtractor) -> Result<Self, ResourceError> {
        let mut idx = Self::new();
        for line in corpus.lines() {
            let line = line.map_err(|e| ResourceError::io("corpus", e))?;
            if !line.trim().is_empty() {
                idx.add_sentence(&line, extractor);
            }
        }
        Ok(idx)
    }

    /// Merges counts of `other` into `self`.
    pub fn merge(&mut self, other: CorpusIndex) {
        self.doc_count += other.doc_count;
        for (k, v) in other.role_counts {
            *self.role_counts.entry(k).or_default() += v;
        }
        for (k, v) in other.connective_triple_counts {
            *self.connective_triple_counts.entry(k).or_default() += v;
        }
    }

    pub fn set_role_count(&mut self, lemma: &str, role: Role, count: u64) {
        self.role_counts.insert((lemma.to_string(), role), count);
    }

    pub fn set_connective_count(&mut self, v: &str, cn: &str, x: &str, count: u64) {
        self.connective_triple_counts
            .insert((v.to_string(), cn.to_string(), stem(x)), count);
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<(), ResourceError> {
        let dump = IndexDump {
            version: INDEX_VERSION,
            doc_count: self.doc_count,
            role_counts: self
                .role_counts
                .iter()
                .map(|((l, r), c)| (l.clone(), *r, *c))
                .collect(),
            connective_triple_counts: self
                .connective_triple_counts
                .iter()
                .map(|((v, cn, x), c)| (v.clone(), cn.clone(), x.clone(), *c))
                .collect(),
        };
        serde_json::to_writer(w, &dump).map_err(|e| ResourceError::parse("corpus index", 0, e))
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self, ResourceError> {
        let dump: IndexDump =
            serde_json::from_reader(r).map_err(|e| ResourceError::parse("corpus index", 0, e))?;
        if dump.version != INDEX_VERSION {
            return Err(ResourceError::Version {
                what: "corpus index",
                found: dump.version,
                expected: INDEX_VERSION,
            });
        }
        Ok(Self {
            doc_count: dump.doc_count,
            role_counts: dump
                .role_counts
                .into_iter()
                .map(|(l, r, c)| ((l, r), c))
                .collect(),
            connective_triple_counts: dump
                .connective_triple_counts
                .into_iter()
                .map(|(v, cn, x, c)| ((v, cn, x), c))
                .collect(),
        })
    }
}
