use serde::{Deserialize, Serialize};

use super::{tokenize, Pos, TextError, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SentenceType {
    Simple,
    Compound,
    Complex,
    CompoundComplex,
}

impl SentenceType {
    pub const ALL: [SentenceType; 4] = [
        SentenceType::Simple,
        SentenceType::Compound,
        SentenceType::Complex,
        SentenceType::CompoundComplex,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SentenceType::Simple => "simple",
            SentenceType::Compound => "compound",
            SentenceType::Complex => "complex",
            SentenceType::CompoundComplex => "compound-complex",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceShape {
    pub sentence_type: SentenceType,
    pub pattern: String,
}

/// One clause: the connective token that introduces it (if any) and the
/// indices of its word tokens, connective excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub connective: Option<usize>,
    pub tokens: Vec<usize>,
}

impl Clause {
    fn has_verb(&self, toks: &[Token]) -> bool {
        self.tokens.iter().any(|&i| toks[i].is_verbal())
    }
}

/// Splits a tagged sentence into clauses at connectives. A connective only
/// opens a clause when both sides carry a verb; otherwise it is folded into
/// the surrounding clause ("the cat and the dog ran").
pub fn segment_clauses(tokens: &[Token]) -> Vec<Clause> {
    let mut raw: Vec<Clause> = vec![Clause {
        connective: None,
        tokens: Vec::new(),
    }];
    let mut leading_sub_pending = false;
    for t in tokens.iter().filter(|t| t.is_word() || t.surface == ",") {
        let current = raw.last_mut().expect("at least one clause");
        if matches!(t.pos, Pos::ConjSub | Pos::ConjCoord) {
            if current.tokens.is_empty() && current.connective.is_none() {
                // sentence-initial subordinator: "Because it rained, he left."
                current.connective = Some(t.index);
                leading_sub_pending = t.pos == Pos::ConjSub;
            } else {
                raw.push(Clause {
                    connective: Some(t.index),
                    tokens: Vec::new(),
                });
                leading_sub_pending = false;
            }
        } else if t.surface == "," {
            if leading_sub_pending && current.has_verb(tokens) {
                raw.push(Clause {
                    connective: None,
                    tokens: Vec::new(),
                });
                leading_sub_pending = false;
            }
        } else {
            current.tokens.push(t.index);
        }
    }
    let mut merged: Vec<Clause> = Vec::new();
    for clause in raw {
        let Some(prev) = merged.last_mut() else {
            merged.push(clause);
            continue;
        };
        let coordinator = clause.connective.is_some_and(|c| tokens[c].pos == Pos::ConjCoord);
        if !clause.has_verb(tokens) || (coordinator && !prev.has_verb(tokens)) {
            prev.tokens.extend(clause.connective);
            prev.tokens.extend(clause.tokens);
            prev.tokens.sort_unstable();
        } else {
            merged.push(clause);
        }
    }
    // a leading connective only counts when a main clause follows it
    let unmatched = merged[0].connective.is_some() && merged.get(1).map_or(true, |c| c.connective.is_some());
    if unmatched {
        let first = &mut merged[0];
        first.tokens.extend(first.connective.take());
        first.tokens.sort_unstable();
    }
    merged
}

fn shape_of(tokens: &[Token], clauses: &[Clause]) -> SentenceShape {
    let mut pattern = String::new();
    let mut subs = 0;
    let mut coords = 0;
    for (i, c) in clauses.iter().enumerate() {
        if let Some(ci) = c.connective {
            match tokens[ci].pos {
                Pos::ConjSub => subs += 1,
                _ => coords += 1,
            }
            if !pattern.is_empty() {
                pattern.push(' ');
            }
            pattern.push_str(&tokens[ci].lower());
        }
        if !pattern.is_empty() {
            pattern.push(' ');
        }
        pattern.push_str("SV");
        // leading subordinate clause is set off by a comma
        if i == 0 && c.connective.is_some() && clauses.len() > 1 && clauses[1].connective.is_none() {
            pattern.push(',');
        }
    }
    let sentence_type = match (subs > 0, coords > 0) {
        (false, false) => SentenceType::Simple,
        (false, true) => SentenceType::Compound,
        (true, false) => SentenceType::Complex,
        (true, true) => SentenceType::CompoundComplex,
    };
    SentenceShape {
        sentence_type,
        pattern,
    }
}

pub(crate) fn classify_tokens(tokens: &[Token]) -> SentenceShape {
    shape_of(tokens, &segment_clauses(tokens))
}

/// Sentence type and clause pattern (e.g. `"SV because SV"`).
pub fn classify_sentence(text: &str) -> Result<SentenceShape, TextError> {
    Ok(classify_tokens(&tokenize(text)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shape(text: &str) -> (SentenceType, String) {
        let s = classify_sentence(text).unwrap();
        (s.sentence_type, s.pattern)
    }

    #[test]
    fn shapes() {
        assert_eq!(
            shape("The city councilmen refused the demonstrators a permit because they feared violence."),
            (SentenceType::Complex, "SV because SV".into())
        );
        assert_eq!(shape("The cat ran."), (SentenceType::Simple, "SV".into()));
        assert_eq!(
            shape("He left and she stayed because it rained."),
            (SentenceType::CompoundComplex, "SV and SV because SV".into())
        );
        assert_eq!(
            shape("The cat and the dog ran."),
            (SentenceType::Simple, "SV".into())
        );
        assert_eq!(
            shape("Because it rained, he left."),
            (SentenceType::Complex, "because SV, SV".into())
        );
        assert_eq!(
            shape("John hit Bill but he did not cry."),
            (SentenceType::Compound, "SV but SV".into())
        );
    }

    #[test]
    fn clause_token_sets() {
        let toks = tokenize("The cat caught the mouse because it was clever.").unwrap();
        let cl = segment_clauses(&toks);
        assert_eq!(cl.len(), 2);
        assert_eq!(cl[0].tokens, vec![0, 1, 2, 3, 4]);
        assert_eq!(cl[1].connective, Some(5));
        assert_eq!(cl[1].tokens, vec![6, 7, 8]);
    }

    proptest! {
        #[test]
        fn skeleton_count_matches_connectives(
            words in proptest::collection::vec(
                prop_oneof![
                    Just("the"), Just("cat"), Just("caught"), Just("mouse"), Just("because"),
                    Just("and"), Just("it"), Just("was"), Just("clever"), Just("but"), Just("ran"),
                ],
                1..14,
            )
        ) {
            let text = words.join(" ");
            let toks = tokenize(&text).unwrap();
            let clauses = segment_clauses(&toks);
            let s = classify_tokens(&toks);
            let connectives = clauses.iter().filter(|c| c.connective.is_some()).count();
            prop_assert_eq!(s.pattern.matches("SV").count(), 1 + connectives);
            prop_assert_eq!(s.sentence_type == SentenceType::Simple, s.pattern == "SV");
            for c in clauses.iter().filter_map(|c| c.connective) {
                prop_assert!(text.contains(&toks[c].surface));
            }
        }
    }
}
