//! Candidate/pronoun polarity matching, shared by the lexicon rule and the
//! pluggable analyzer.

use super::analysis::AnalyzedHalf;
use crate::resources::{Polarity, PolarityLexicon, Role};
use crate::text::Pos;

/// Polarity of an event word, optionally under negation.
pub trait PolarityAnalyzer: Send + Sync {
    fn polarity(&self, lemma: &str, negated: bool) -> Polarity;
}

/// Plain lexicon lookup; negation is ignored.
pub struct LexiconRule<'a>(pub &'a PolarityLexicon);

impl PolarityAnalyzer for LexiconRule<'_> {
    fn polarity(&self, lemma: &str, _negated: bool) -> Polarity {
        self.0.polarity_of(lemma)
    }
}

/// Lexicon lookup whose result is flipped when the event is negated. This is
/// the default machine analyzer.
#[derive(Debug, Clone, Default)]
pub struct NegationFlipAnalyzer {
    lexicon: PolarityLexicon,
}

impl NegationFlipAnalyzer {
    pub fn new(lexicon: PolarityLexicon) -> Self {
        Self { lexicon }
    }
}

impl PolarityAnalyzer for NegationFlipAnalyzer {
    fn polarity(&self, lemma: &str, negated: bool) -> Polarity {
        let p = self.lexicon.polarity_of(lemma);
        if negated {
            p.flip()
        } else {
            p
        }
    }
}

/// Polarity a participant takes from an event: subjects share it, objects
/// receive the opposite.
fn project(event: Polarity, role: Option<Role>) -> Polarity {
    match role {
        Some(Role::Subject) => event,
        Some(Role::Object) => event.flip(),
        None => Polarity::Neutral,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityMatch {
    /// (i1, i2) marker of the polarity-matched candidate
    pub matched: (i64, i64),
    pub pairs: [String; 2],
    pub pairs_with_connective: [String; 2],
    /// 1, 2 or -1
    pub choice: i64,
    pub covered: bool,
}

pub fn polarity_match(a: &AnalyzedHalf, analyzer: &dyn PolarityAnalyzer) -> PolarityMatch {
    let cand = match a.main_triple() {
        Some(t) => {
            let ev = analyzer.polarity(&t.verb.lemma.to_lowercase(), t.is_negated());
            [project(ev, a.candidate_role(0)), project(ev, a.candidate_role(1))]
        }
        None => [Polarity::Neutral; 2],
    };
    let pronoun = match (a.pronoun_triple(), a.x_token()) {
        (Some(t), Some(x)) => {
            let ev = analyzer.polarity(&x.lemma.to_lowercase(), t.is_negated());
            if x.pos == Pos::Adj {
                // a predicate adjective describes its subject directly
                if a.pronoun_sentence_role() == Some(Role::Subject) {
                    ev
                } else {
                    Polarity::Neutral
                }
            } else {
                project(ev, a.pronoun_sentence_role())
            }
        }
        _ => Polarity::Neutral,
    };
    let hit = |p: Polarity| pronoun != Polarity::Neutral && p == pronoun;
    let matched = match (hit(cand[0]), hit(cand[1])) {
        (true, false) => (1, 0),
        (false, true) => (0, 1),
        _ => (0, 0),
    };
    let choice = match matched {
        (1, 0) => 1,
        (0, 1) => 2,
        _ => -1,
    };
    let pairs = cand.map(|c| format!("{}-{}", c.as_str(), pronoun.as_str()));
    let pairs_with_connective = match a.reversing_connective() {
        Some(cn) => pairs.clone().map(|p| format!("{p}-{cn}")),
        None => pairs.clone(),
    };
    let covered = cand.iter().any(|&p| p != Polarity::Neutral) || pronoun != Polarity::Neutral;
    PolarityMatch {
        matched,
        pairs,
        pairs_with_connective,
        choice,
        covered,
    }
}
