//! The twelve feature components and the 47-feature vector they produce.
//!
//! Components never fail: missing evidence (no verb, uncached search hits,
//! unknown words) yields documented sentinels and clears the component's
//! coverage flag.

mod analysis;
pub mod components;
mod dump;
mod encode;
mod polarity;
mod queries;
mod vector;

use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;

pub use analysis::{AnalyzedHalf, Candidate};
pub use dump::{parse_csv, parse_json, to_csv, to_json};
pub use encode::FeatureSchema;
pub use polarity::{polarity_match, LexiconRule, NegationFlipAnalyzer, PolarityAnalyzer, PolarityMatch};
pub use queries::{build_queries, build_queries_with, majority, pair_decision, QuerySet};
pub use vector::{
    sentinel_value, Component, Coverage, Feature, FeatureKind, FeatureValue, FeatureVector, N_FEATURES,
};

use crate::resources::Resources;
use crate::schema::SchemaHalf;

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("invalid extraction config: {0}")]
    InvalidConfig(String),
    #[error("feature dump, record {record}: {message}")]
    Parse { record: usize, message: String },
    #[error("feature dump header does not match the feature enumeration: {0}")]
    Header(String),
    #[error("feature schema: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionConfig {
    /// relative hit-count difference needed for a query-pair decision
    pub threshold: f64,
    /// minimum corpus count of a (V, Cn, X) pattern
    pub min_connective_count: u64,
    pub network_enabled: bool,
    pub resources_dir: Option<PathBuf>,
    /// retry chain lookups on stems and synonyms
    pub chain_fallback: bool,
    /// scores with |s| below this are neutral
    pub neutral_band: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            threshold: 0.20,
            min_connective_count: 100,
            network_enabled: false,
            resources_dir: None,
            chain_fallback: true,
            neutral_band: 0.1,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(FeatureError::InvalidConfig(format!(
                "threshold {} outside (0, 1)",
                self.threshold
            )));
        }
        if self.min_connective_count < 1 {
            return Err(FeatureError::InvalidConfig("min connective count must be >= 1".into()));
        }
        if !(self.neutral_band >= 0.0 && self.neutral_band < 1.0) {
            return Err(FeatureError::InvalidConfig("neutral band outside [0, 1)".into()));
        }
        Ok(())
    }
}

/// Feature extraction bound to a set of resources.
pub struct FeatureExtractor {
    resources: Arc<Resources>,
    config: ExtractionConfig,
    analyzer: Box<dyn PolarityAnalyzer>,
}

impl FeatureExtractor {
    pub fn new(resources: Arc<Resources>, config: ExtractionConfig) -> Result<Self, FeatureError> {
        config.validate()?;
        let analyzer = Box::new(NegationFlipAnalyzer::new(resources.polarity.clone()));
        Ok(Self {
            resources,
            config,
            analyzer,
        })
    }

    /// Replaces the machine polarity analyzer used for the OP features.
    pub fn with_analyzer(mut self, analyzer: Box<dyn PolarityAnalyzer>) -> Self {
        self.analyzer = analyzer;
        self
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn config(&self) -> &ExtractionConfig {
        &self.config
    }

    pub fn analyze(&self, half: &SchemaHalf) -> Option<AnalyzedHalf> {
        AnalyzedHalf::new(half, self.resources.annotations.get(&half.id)).ok()
    }

    pub fn extract(&self, half: &SchemaHalf) -> FeatureVector {
        match self.analyze(half) {
            Some(a) => self.extract_analyzed(&half.id, &a),
            None => {
                log::warn!("half {}: text could not be analysed, emitting sentinels", half.id);
                FeatureVector::sentinel(&half.id)
            }
        }
    }

    /// Extracts every half in parallel; output order follows input order.
    pub fn extract_batch(&self, halves: &[SchemaHalf]) -> Vec<FeatureVector> {
        halves.par_iter().map(|h| self.extract(h)).collect()
    }

    /// Every search phrase extraction of `half` looks up, plain and framed.
    pub fn query_phrases(&self, half: &SchemaHalf) -> Vec<String> {
        let Some(a) = self.analyze(half) else {
            return Vec::new();
        };
        let plain = build_queries(&a);
        let framed = components::frame_substitutes(&a, &self.resources.frames)
            .and_then(|[n1, n2]| build_queries_with(&a, [&n1, &n2]));
        let mut out: Vec<String> = plain
            .iter()
            .chain(&framed)
            .flat_map(|q| q.phrases())
            .map(str::to_string)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn extract_analyzed(&self, id: &str, a: &AnalyzedHalf) -> FeatureVector {
        use components::*;
        use Feature::*;
        let r = &*self.resources;
        let cfg = &self.config;
        let mut v = FeatureVector::sentinel(id);
        let mut cov = Coverage::default();

        let shape = f_sentence_pattern(a);
        v.set_cat(ST, shape.sentence_type.as_str());
        v.set_cat(SP, shape.pattern);
        cov.set(Component::SentencePattern, true);

        let (stn, qtn, c) = f_negation(a);
        v.set_int(STN, stn);
        v.set_int(QTN, qtn);
        cov.set(Component::Negation, c);

        let (sem, c) = f_semantic_role(a, &r.corpus);
        v.set_int(SEM, sem);
        cov.set(Component::SemanticRelations, c);

        v.set_int(SL, f_length(a));
        cov.set(Component::NumberOfWords, true);

        let (wr, c) = f_word_relations(a);
        for (f, x) in [WN, WP, HN, VF, JF].into_iter().zip(wr) {
            v.set_int(f, x);
        }
        cov.set(Component::WordRelations, c);

        let (gl, c1) = f_search_queries(a, &r.hits, cfg.threshold);
        let (glf, c2) = f_search_queries_framed(a, &r.frames, &r.hits, cfg.threshold);
        let gl_names = [GL1i1, GL1i2, GL2i1, GL2i2, GL3i1, GL3i2, GL4i1, GL4i2];
        let glf_names = [GLF1i1, GLF1i2, GLF2i1, GLF2i2, GLF3i1, GLF3i2, GLF4i1, GLF4i2];
        for i in 0..8 {
            v.set_int(gl_names[i], gl[i]);
            v.set_int(glf_names[i], glf[i]);
        }
        cov.set(Component::SearchQueries, c1 || c2);

        let (cn, cnf, c) = f_relatedness(a, &r.relatedness, &r.frames);
        v.set_int(CN, cn);
        v.set_int(CNF, cnf);
        cov.set(Component::Relatedness, c);

        let (cnt, c) = f_connective(a, &r.corpus, cfg.min_connective_count);
        v.set_int(CNT, cnt);
        cov.set(Component::DiscourseConnective, c);

        let (nch, c) = f_narrative_chain(a, &r.chains, cfg.chain_fallback);
        v.set_int(NCH, nch);
        cov.set(Component::NarrativeChains, c);

        let rp = polarity_match(a, &LexiconRule(&r.polarity));
        set_polarity_block(&mut v, [RP1i1, RP1i2, RP2i1, RP2i2, RP3i1, RP3i2, RPTL], &rp);
        cov.set(Component::PolarityRules, rp.covered);

        let op = polarity_match(a, self.analyzer.as_ref());
        set_polarity_block(&mut v, [OP1i1, OP1i2, OP2i1, OP2i2, OP3i1, OP3i2, OPTL], &op);
        cov.set(Component::PolarityAnalyzer, op.covered);

        let (s, q, c) = f_polarity_simple(a, &r.sentiment, cfg.neutral_band);
        v.set_cat(TBSPOL, s.as_str());
        v.set_cat(TBQPOL, q.as_str());
        cov.set(Component::PolarityScores, c);

        v.coverage = cov;
        v
    }
}

fn set_polarity_block(v: &mut FeatureVector, f: [Feature; 7], m: &PolarityMatch) {
    v.set_int(f[0], m.matched.0);
    v.set_int(f[1], m.matched.1);
    v.set_cat(f[2], m.pairs[0].clone());
    v.set_cat(f[3], m.pairs[1].clone());
    v.set_cat(f[4], m.pairs_with_connective[0].clone());
    v.set_cat(f[5], m.pairs_with_connective[1].clone());
    v.set_int(f[6], m.choice);
}

/// Extracts one half's features against `resources`.
pub fn extract_all(half: &SchemaHalf, resources: Arc<Resources>, cfg: &ExtractionConfig) -> Result<FeatureVector, FeatureError> {
    Ok(FeatureExtractor::new(resources, cfg.clone())?.extract(half))
}
