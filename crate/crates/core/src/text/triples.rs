use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::clauses::segment_clauses;
use super::lexicon::lemmatize;
use super::{tokenize, Pos, TextError, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TripleKind {
    /// subject / verb / object relation
    #[default]
    Relation,
    /// link from a copular auxiliary to the main verb of the preceding clause
    /// (`verb` = auxiliary, `object` = linked verb)
    VerbLink,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticTriple {
    pub kind: TripleKind,
    pub subject: Option<Token>,
    pub verb: Token,
    pub object: Option<Token>,
    pub negated_subject_clause: bool,
    pub negated_verb: bool,
    /// Index of the clause holding the verb.
    pub clause: usize,
}

impl SemanticTriple {
    pub fn is_relation(&self) -> bool {
        self.kind == TripleKind::Relation
    }

    pub fn is_negated(&self) -> bool {
        self.negated_verb || self.negated_subject_clause
    }

    pub fn mentions(&self, index: usize) -> bool {
        self.subject.as_ref().is_some_and(|t| t.index == index)
            || self.object.as_ref().is_some_and(|t| t.index == index)
    }
}

/// Triple as stored in an annotation file; token fields are indices into the
/// full token list of the annotated text (punctuation included).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleRef {
    #[serde(default)]
    pub kind: TripleKind,
    pub subject: Option<usize>,
    pub verb: usize,
    pub object: Option<usize>,
    #[serde(default)]
    pub negated_subject_clause: bool,
    #[serde(default)]
    pub negated_verb: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HalfAnnotation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentence_triples: Option<Vec<TripleRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question_triples: Option<Vec<TripleRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Vec<Pos>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question_pos: Option<Vec<Pos>>,
}

/// Annotations keyed by half id.
pub type ParseAnnotations = BTreeMap<String, HalfAnnotation>;

/// Annotation for one text (sentence or question).
#[derive(Debug, Clone, Copy, Default)]
pub struct TextAnnotation<'a> {
    pub triples: Option<&'a [TripleRef]>,
    pub pos: Option<&'a [Pos]>,
}

impl HalfAnnotation {
    pub fn sentence(&self) -> TextAnnotation<'_> {
        TextAnnotation {
            triples: self.sentence_triples.as_deref(),
            pos: self.pos.as_deref(),
        }
    }

    pub fn question(&self) -> TextAnnotation<'_> {
        TextAnnotation {
            triples: self.question_triples.as_deref(),
            pos: self.question_pos.as_deref(),
        }
    }
}

pub fn parse_annotations(json: &str) -> Result<ParseAnnotations, TextError> {
    serde_json::from_str(json).map_err(|e| TextError::InvalidAnnotation(e.to_string()))
}

/// Tokenizes `text`, replacing tags (and lemmas) with annotated ones if given.
pub fn tag_with(text: &str, annotation: Option<&TextAnnotation>) -> Result<Vec<Token>, TextError> {
    let mut tokens = tokenize(text)?;
    if let Some(pos) = annotation.and_then(|a| a.pos) {
        if pos.len() != tokens.len() {
            return Err(TextError::InvalidAnnotation(format!(
                "{} tags for {} tokens",
                pos.len(),
                tokens.len()
            )));
        }
        for (t, &p) in tokens.iter_mut().zip(pos) {
            if p != t.pos {
                t.pos = p;
                t.lemma = if p == Pos::Punct {
                    t.surface.clone()
                } else {
                    lemmatize(&t.lower(), p)
                };
            }
        }
    }
    Ok(tokens)
}

fn is_negation(t: &Token) -> bool {
    matches!(t.lemma.as_str(), "not" | "never")
}

/// Heads of noun phrases (last noun of a noun run, or a lone pronoun).
fn np_heads<'a>(tokens: &'a [Token], idxs: &[usize]) -> Vec<&'a Token> {
    let mut heads = Vec::new();
    let mut k = 0;
    while k < idxs.len() {
        let t = &tokens[idxs[k]];
        match t.pos {
            Pos::Pronoun => {
                heads.push(t);
                k += 1;
            }
            Pos::Noun => {
                while k + 1 < idxs.len() && tokens[idxs[k + 1]].pos == Pos::Noun {
                    k += 1;
                }
                heads.push(&tokens[idxs[k]]);
                k += 1;
            }
            _ => k += 1,
        }
    }
    heads
}

fn main_verb(tokens: &[Token], idxs: &[usize]) -> Option<usize> {
    idxs.iter()
        .position(|&i| tokens[i].pos == Pos::Verb)
        .or_else(|| idxs.iter().position(|&i| tokens[i].pos == Pos::AuxVerb))
}

pub(crate) fn heuristic_triples(tokens: &[Token]) -> Result<Vec<SemanticTriple>, TextError> {
    if !tokens.iter().any(Token::is_verbal) {
        let text: Vec<&str> = tokens.iter().map(|t| t.surface.as_str()).collect();
        return Err(TextError::NoVerbFound(text.join(" ")));
    }
    let clauses = segment_clauses(tokens);
    let mut relations = Vec::new();
    let mut links = Vec::new();
    let mut prev_verb: Option<&Token> = None;
    for (ci, clause) in clauses.iter().enumerate() {
        let idxs = &clause.tokens;
        let Some(vpos) = main_verb(tokens, idxs) else {
            continue;
        };
        let verb = &tokens[idxs[vpos]];
        let before = &idxs[..vpos];
        let after = &idxs[vpos + 1..];
        let subject = np_heads(tokens, before).first().copied().cloned();
        let object = np_heads(tokens, after)
            .first()
            .copied()
            .or_else(|| after.iter().map(|&i| &tokens[i]).find(|t| t.pos == Pos::Adj))
            .cloned();
        let negated_verb = idxs.iter().any(|&i| is_negation(&tokens[i]))
            || after.iter().any(|&i| tokens[i].lemma == "no");
        let negated_subject_clause = before.iter().any(|&i| tokens[i].lemma == "no");
        if subject.is_some() || object.is_some() {
            relations.push(SemanticTriple {
                kind: TripleKind::Relation,
                subject,
                verb: verb.clone(),
                object,
                negated_subject_clause,
                negated_verb,
                clause: ci,
            });
        }
        if verb.pos == Pos::AuxVerb {
            if let Some(pv) = prev_verb {
                links.push(SemanticTriple {
                    kind: TripleKind::VerbLink,
                    subject: None,
                    verb: verb.clone(),
                    object: Some(pv.clone()),
                    negated_subject_clause: false,
                    negated_verb,
                    clause: ci,
                });
            }
        }
        prev_verb = Some(verb);
    }
    relations.extend(links);
    Ok(relations)
}

fn resolve_refs(tokens: &[Token], refs: &[TripleRef]) -> Result<Vec<SemanticTriple>, TextError> {
    let clauses = segment_clauses(tokens);
    let get = |i: usize| -> Result<Token, TextError> {
        tokens
            .get(i)
            .filter(|t| t.is_word())
            .cloned()
            .ok_or_else(|| TextError::InvalidAnnotation(format!("token index {i} is not a word of the text")))
    };
    refs.iter()
        .map(|r| {
            if r.kind == TripleKind::Relation && r.subject.is_none() && r.object.is_none() {
                return Err(TextError::InvalidAnnotation(format!(
                    "relation at verb {} has neither subject nor object",
                    r.verb
                )));
            }
            let clause = clauses
                .iter()
                .position(|c| c.tokens.contains(&r.verb) || c.connective == Some(r.verb))
                .unwrap_or(0);
            Ok(SemanticTriple {
                kind: r.kind,
                subject: r.subject.map(get).transpose()?,
                verb: get(r.verb)?,
                object: r.object.map(get).transpose()?,
                negated_subject_clause: r.negated_subject_clause,
                negated_verb: r.negated_verb,
                clause,
            })
        })
        .collect()
}

/// Triples over already tagged tokens; annotated triples take precedence.
pub(crate) fn triples_for_tokens(
    tokens: &[Token],
    annotation: Option<&TextAnnotation>,
) -> Result<Vec<SemanticTriple>, TextError> {
    match annotation.and_then(|a| a.triples) {
        Some(refs) => resolve_refs(tokens, refs),
        None => heuristic_triples(tokens),
    }
}

/// Semantic triples of `text`. With an annotation carrying triples, those are
/// returned (after index validation); otherwise the rule-based extractor runs.
pub fn extract_triples(
    text: &str,
    annotation: Option<&TextAnnotation>,
) -> Result<Vec<SemanticTriple>, TextError> {
    let tokens = tag_with(text, annotation)?;
    triples_for_tokens(&tokens, annotation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegationScope {
    /// the clause relating the two candidates
    CandidatesClause,
    /// the clause holding the definite pronoun
    PronounClause,
}

/// Whether the triple covering `scope` carries a negation marker.
pub fn detect_negation(triples: &[SemanticTriple], scope: NegationScope) -> Result<bool, TextError> {
    let mut relations = triples.iter().filter(|t| t.is_relation());
    let triple = match scope {
        NegationScope::CandidatesClause => triples
            .iter()
            .find(|t| t.is_relation() && t.clause == 0)
            .or_else(|| relations.next()),
        NegationScope::PronounClause => {
            let has_pronoun = |t: &&SemanticTriple| {
                [&t.subject, &t.object]
                    .into_iter()
                    .flatten()
                    .any(|x| x.pos == Pos::Pronoun)
            };
            triples
                .iter()
                .filter(|t| t.is_relation())
                .filter(has_pronoun)
                .last()
                .or_else(|| relations.last())
        }
    };
    triple
        .map(SemanticTriple::is_negated)
        .ok_or(TextError::Undetermined("no triple covers the negation scope"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn compact(ts: &[SemanticTriple]) -> Vec<(TripleKind, Option<String>, String, Option<String>)> {
        ts.iter()
            .map(|t| {
                (
                    t.kind,
                    t.subject.as_ref().map(|x| x.surface.clone()),
                    t.verb.surface.clone(),
                    t.object.as_ref().map(|x| x.surface.clone()),
                )
            })
            .collect()
    }

    #[test]
    fn catch_triples() {
        let ts = extract_triples("The cat caught the mouse because it was clever.", None).unwrap();
        let s = |x: &str| Some(x.to_string());
        assert_eq!(
            compact(&ts),
            vec![
                (TripleKind::Relation, s("cat"), "caught".into(), s("mouse")),
                (TripleKind::Relation, s("it"), "was".into(), s("clever")),
                (TripleKind::VerbLink, None, "was".into(), s("caught")),
            ]
        );
        assert_eq!(ts[1].verb.pos, Pos::AuxVerb);
        assert_eq!(ts[0].verb.lemma, "catch");
        assert_eq!((ts[0].clause, ts[1].clause), (0, 1));
    }

    #[test]
    fn councilmen_triples() {
        let ts = extract_triples(
            "The city councilmen refused the demonstrators a permit because they advocated violence.",
            None,
        )
        .unwrap();
        let s = |x: &str| Some(x.to_string());
        assert_eq!(
            compact(&ts),
            vec![
                (TripleKind::Relation, s("councilmen"), "refused".into(), s("demonstrators")),
                (TripleKind::Relation, s("they"), "advocated".into(), s("violence")),
            ]
        );
    }

    #[test]
    fn verbless_text() {
        assert!(matches!(extract_triples("Violence!", None), Err(TextError::NoVerbFound(_))));
        assert!(matches!(extract_triples("", None), Err(TextError::EmptyText)));
    }

    #[test]
    fn negation_scopes() {
        use NegationScope::*;
        let ts = extract_triples("The cat did not catch the mouse because it was clever.", None).unwrap();
        assert!(detect_negation(&ts, CandidatesClause).unwrap());
        assert!(!detect_negation(&ts, PronounClause).unwrap());

        let ts = extract_triples("The cat caught the mouse because it was clever.", None).unwrap();
        assert!(!detect_negation(&ts, CandidatesClause).unwrap());
        assert!(!detect_negation(&ts, PronounClause).unwrap());

        let ts = extract_triples("The cat caught the mouse because it was not clever.", None).unwrap();
        assert!(!detect_negation(&ts, CandidatesClause).unwrap());
        assert!(detect_negation(&ts, PronounClause).unwrap());

        let ts = extract_triples("No cat caught the mouse.", None).unwrap();
        assert!(ts[0].negated_subject_clause);
        assert!(detect_negation(&[], CandidatesClause).is_err());
    }

    #[test]
    fn annotation_is_identity() {
        let refs = vec![
            TripleRef {
                kind: TripleKind::Relation,
                subject: Some(4),
                verb: 2,
                object: None,
                negated_subject_clause: false,
                negated_verb: true,
            },
            TripleRef {
                kind: TripleKind::VerbLink,
                subject: None,
                verb: 7,
                object: Some(2),
                negated_subject_clause: false,
                negated_verb: false,
            },
        ];
        let ann = TextAnnotation {
            triples: Some(&refs),
            pos: None,
        };
        let ts = extract_triples("The cat caught the mouse because it was clever.", Some(&ann)).unwrap();
        let back: Vec<TripleRef> = ts
            .iter()
            .map(|t| TripleRef {
                kind: t.kind,
                subject: t.subject.as_ref().map(|x| x.index),
                verb: t.verb.index,
                object: t.object.as_ref().map(|x| x.index),
                negated_subject_clause: t.negated_subject_clause,
                negated_verb: t.negated_verb,
            })
            .collect();
        assert_eq!(back, refs);

        let bad = [TripleRef {
            verb: 99,
            ..refs[0].clone()
        }];
        let ann = TextAnnotation {
            triples: Some(&bad),
            pos: None,
        };
        assert!(matches!(
            extract_triples("The cat ran.", Some(&ann)),
            Err(TextError::InvalidAnnotation(_))
        ));
    }

    #[test]
    fn annotation_file_round_trip() {
        let json = r#"{"h1": {"sentence_triples": [{"subject": 1, "verb": 2, "object": 4}],
                      "pos": ["det","noun","verb","det","noun","punct"]}}"#;
        let anns = parse_annotations(json).unwrap();
        let a = anns["h1"].sentence();
        let toks = tag_with("The cat caught the mouse.", Some(&a)).unwrap();
        assert_eq!(toks[2].lemma, "catch");
        assert!(anns["h1"].question().triples.is_none());
        let wrong = parse_annotations(r#"{"h1": {"pos": ["noun"]}}"#).unwrap();
        assert!(tag_with("The cat ran.", Some(&wrong["h1"].sentence())).is_err());
    }
}
