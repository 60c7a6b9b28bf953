//! One function per feature component. Each returns its values and whether
//! the component was applicable (false means sentinels were emitted).

use std::collections::BTreeSet;

use super::analysis::{role_in, AnalyzedHalf};
use super::queries::{build_queries, build_queries_with, search_features};
use crate::resources::{
    ChainEvent, CorpusIndex, FrameRoleTable, HitCountProvider, NarrativeChainDb, Polarity, RelatednessTable,
    Role, SentimentScores,
};
use crate::text::{self, NegationScope, Pos, SentenceShape};

/// 1 when the first value wins, 2 when the second does, -1 on a tie.
fn choice(a: f64, b: f64) -> i64 {
    if a > b {
        1
    } else if b > a {
        2
    } else {
        -1
    }
}

fn choice_of(candidate: Option<usize>) -> i64 {
    candidate.map_or(-1, |i| i as i64 + 1)
}

pub fn f_sentence_pattern(a: &AnalyzedHalf) -> SentenceShape {
    text::classify_tokens(&a.tokens)
}

/// (STN, QTN, covered)
pub fn f_negation(a: &AnalyzedHalf) -> (i64, i64, bool) {
    let stn = a
        .triples
        .as_ref()
        .ok()
        .and_then(|t| text::detect_negation(t, NegationScope::CandidatesClause).ok());
    let qtn = a
        .question_triples
        .as_ref()
        .ok()
        .and_then(|t| text::detect_negation(t, NegationScope::PronounClause).ok())
        .or_else(|| {
            a.triples
                .as_ref()
                .ok()
                .and_then(|t| text::detect_negation(t, NegationScope::PronounClause).ok())
        });
    (
        i64::from(stn.unwrap_or(false)),
        i64::from(qtn.unwrap_or(false)),
        stn.is_some() && qtn.is_some(),
    )
}

/// Role a lemma mostly takes in the corpus; `None` on a tie.
fn majority_role(idx: &CorpusIndex, lemma: &str) -> Option<Role> {
    let s = idx.role_frequency(lemma, Role::Subject);
    let o = idx.role_frequency(lemma, Role::Object);
    match s.cmp(&o) {
        std::cmp::Ordering::Greater => Some(Role::Subject),
        std::cmp::Ordering::Less => Some(Role::Object),
        std::cmp::Ordering::Equal => None,
    }
}

/// SEM: the candidate whose usual corpus role matches the pronoun's role.
/// When both match, the larger count in that role wins.
pub fn f_semantic_role(a: &AnalyzedHalf, idx: &CorpusIndex) -> (i64, bool) {
    let (Some(role), Some(l1), Some(l2)) = (a.pronoun_question_role(), a.candidate_lemma(0), a.candidate_lemma(1))
    else {
        return (-1, false);
    };
    let m = [majority_role(idx, &l1), majority_role(idx, &l2)];
    let v = match (m[0] == Some(role), m[1] == Some(role)) {
        (true, false) => 1,
        (false, true) => 2,
        (true, true) => choice(
            idx.role_frequency(&l1, role) as f64,
            idx.role_frequency(&l2, role) as f64,
        ),
        (false, false) => -1,
    };
    (v, v != -1)
}

pub fn f_length(a: &AnalyzedHalf) -> i64 {
    a.word_count() as i64
}

/// [WN, WP, HN, VF, JF]; all zero when the sentence has no connective.
pub fn f_word_relations(a: &AnalyzedHalf) -> ([i64; 5], bool) {
    let Some(cn) = a.connective().map(|t| t.index) else {
        return ([0; 5], false);
    };
    let cand: BTreeSet<usize> = a.candidates.iter().flatten().flat_map(|c| c.span.iter().copied()).collect();
    let words: Vec<&text::Token> = a.tokens.iter().filter(|t| t.is_word()).collect();
    let wn = words.len() - cand.len() - 1;
    let before: Vec<_> = words.iter().filter(|t| t.index < cn && !cand.contains(&t.index)).collect();
    let after: Vec<_> = words.iter().filter(|t| t.index > cn && !cand.contains(&t.index)).collect();
    let adj_noun = |x: Pos, y: Pos| matches!((x, y), (Pos::Adj, Pos::Noun) | (Pos::Noun, Pos::Adj));
    let wp = before
        .iter()
        .flat_map(|b| after.iter().map(move |x| (b.pos, x.pos)))
        .filter(|&(x, y)| !adj_noun(x, y))
        .count();
    let heads: Vec<usize> = a.candidates.iter().flatten().map(|c| c.head).collect();
    let hn = a
        .relations()
        .filter(|t| heads.iter().any(|&h| t.mentions(h)))
        .map(|t| t.verb.index)
        .collect::<BTreeSet<_>>()
        .len();
    let vf = words.iter().filter(|t| t.pos == Pos::Verb).count();
    let attributive = a
        .candidates
        .iter()
        .flatten()
        .flat_map(|c| c.full_span.iter())
        .filter(|&&i| a.tokens[i].pos == Pos::Adj)
        .count();
    let predicative = a
        .relations()
        .filter(|t| t.verb.pos == Pos::AuxVerb && t.object.as_ref().is_some_and(|o| o.pos == Pos::Adj))
        .filter(|t| heads.iter().any(|&h| role_in(t, h) == Some(Role::Subject)))
        .count();
    let jf = attributive + predicative;
    ([wn as i64, wp as i64, hn as i64, vf as i64, jf as i64], true)
}

/// Frame-role nouns standing in for two proper-name candidates, chosen by
/// each candidate's role at V.
pub fn frame_substitutes(a: &AnalyzedHalf, frames: &FrameRoleTable) -> Option<[String; 2]> {
    if !a.candidates.iter().all(|c| c.as_ref().is_some_and(|c| c.proper)) {
        return None;
    }
    let roles = frames.frame_roles_for(&a.v_token()?.lemma.to_lowercase())?;
    let pick = |r: Role| match r {
        Role::Subject => roles.ext.to_lowercase(),
        Role::Object => roles.obj.to_lowercase(),
    };
    let (r1, r2) = (a.candidate_role(0)?, a.candidate_role(1)?);
    (r1 != r2).then(|| [pick(r1), pick(r2)])
}

/// (GL1i1..GL4i2, covered)
pub fn f_search_queries(a: &AnalyzedHalf, hits: &HitCountProvider, th: f64) -> ([i64; 8], bool) {
    search_features(build_queries(a).as_ref(), hits, th)
}

/// (GLF1i1..GLF4i2, covered); zeros unless frame substitution applies.
pub fn f_search_queries_framed(
    a: &AnalyzedHalf,
    frames: &FrameRoleTable,
    hits: &HitCountProvider,
    th: f64,
) -> ([i64; 8], bool) {
    let qs = frame_substitutes(a, frames).and_then(|[n1, n2]| build_queries_with(a, [&n1, &n2]));
    search_features(qs.as_ref(), hits, th)
}

/// (CN, CNF, covered)
pub fn f_relatedness(a: &AnalyzedHalf, tbl: &RelatednessTable, frames: &FrameRoleTable) -> (i64, i64, bool) {
    let Some(x) = a.x_token().map(|x| x.lemma.to_lowercase()) else {
        return (-1, -1, false);
    };
    let compare = |w1: &str, w2: &str| choice(tbl.relatedness(w1, &x), tbl.relatedness(w2, &x));
    let cn = match (a.candidate_lemma(0), a.candidate_lemma(1)) {
        (Some(l1), Some(l2)) => compare(&l1, &l2),
        _ => -1,
    };
    let cnf = frame_substitutes(a, frames).map_or(-1, |[n1, n2]| compare(&n1, &n2));
    (cn, cnf, cn != -1 || cnf != -1)
}

/// Whether the pronoun clause compares ("taller than", "more ...").
fn has_comparison(a: &AnalyzedHalf) -> bool {
    let Some(x) = a.x_token() else { return false };
    let comparative_form = x.pos == Pos::Adj && x.lower() != x.lemma.to_lowercase();
    let clause = a.pronoun.and_then(|p| a.clause_of(p));
    let marker = clause.is_some_and(|c| {
        a.clauses[c]
            .tokens
            .iter()
            .any(|&i| matches!(a.tokens[i].lower().as_str(), "than" | "more" | "less" | "most" | "least"))
    });
    comparative_form || marker
}

/// CNT: corpus evidence for the (V, Cn, X) pattern, resolved by role.
pub fn f_connective(a: &AnalyzedHalf, idx: &CorpusIndex, min_count: u64) -> (i64, bool) {
    let (Some(v), Some(cn), Some(x)) = (a.v_token(), a.connective(), a.x_token()) else {
        return (-1, false);
    };
    let count = idx.connective_triple_frequency(&v.lemma.to_lowercase(), &cn.lower(), &x.lemma.to_lowercase());
    if count < min_count {
        return (-1, false);
    }
    let pick = match x.pos {
        Pos::Adj if !has_comparison(a) => a.candidate_with_role(Role::Subject),
        Pos::Adj => None,
        _ => a.pronoun_question_role().and_then(|r| a.candidate_with_role(r)),
    };
    (choice_of(pick), pick.is_some())
}

/// NCH: the chain protagonist's role at V names the candidate.
pub fn f_narrative_chain(a: &AnalyzedHalf, db: &NarrativeChainDb, fallback: bool) -> (i64, bool) {
    let (Some(v), Some(x)) = (a.v_token(), a.x_token()) else {
        return (-1, false);
    };
    let Some(pr) = a.pronoun_sentence_role().or_else(|| a.pronoun_question_role()) else {
        return (-1, false);
    };
    let (v, x) = (v.lemma.to_lowercase(), x.lemma.to_lowercase());
    let pronoun_event = ChainEvent::new(&x, pr);
    let counts = |sim: bool| {
        [Role::Subject, Role::Object].map(|r| db.chains_containing(&ChainEvent::new(&v, r), &pronoun_event, sim).len())
    };
    let mut n = counts(false);
    if n == [0, 0] && fallback {
        n = counts(true);
    }
    let protagonist = match n[0].cmp(&n[1]) {
        std::cmp::Ordering::Greater => Some(Role::Subject),
        std::cmp::Ordering::Less => Some(Role::Object),
        std::cmp::Ordering::Equal => None,
    };
    let pick = protagonist.and_then(|r| a.candidate_with_role(r));
    (choice_of(pick), pick.is_some())
}

/// (TBSPOL, TBQPOL, covered)
pub fn f_polarity_simple(a: &AnalyzedHalf, scores: &SentimentScores, band: f64) -> (Polarity, Polarity, bool) {
    let bucket = |t: Option<&text::Token>| t.map(|t| scores.bucket(&t.lemma.to_lowercase(), band));
    let (s, q) = (bucket(a.v_token()), bucket(a.x_token()));
    (
        s.unwrap_or(Polarity::Neutral),
        q.unwrap_or(Polarity::Neutral),
        s.is_some() || q.is_some(),
    )
}
