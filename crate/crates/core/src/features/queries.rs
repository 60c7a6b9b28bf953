//! Search-phrase construction and hit-count pair decisions.

use serde::Serialize;

use super::analysis::AnalyzedHalf;
use crate::resources::HitCountProvider;
use crate::text::{Pos, Token};

/// The six exact-phrase queries of a half. `qr3`/`qr4` need question words
/// after the verb, `qr5`/`qr6` an adjective after a form of "be".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuerySet {
    pub vq: String,
    pub w: Option<String>,
    pub j: Option<String>,
    pub qr1: String,
    pub qr2: String,
    pub qr3: Option<String>,
    pub qr4: Option<String>,
    pub qr5: Option<String>,
    pub qr6: Option<String>,
}

impl QuerySet {
    pub fn new(a1: &str, a2: &str, vq: &str, w: Option<&str>, j: Option<&str>) -> Self {
        Self {
            vq: vq.to_string(),
            w: w.map(str::to_string),
            j: j.map(str::to_string),
            qr1: format!("{a1} {vq}"),
            qr2: format!("{a2} {vq}"),
            qr3: w.map(|w| format!("{a1} {vq} {w}")),
            qr4: w.map(|w| format!("{a2} {vq} {w}")),
            qr5: j.map(|j| format!("{j} {a1}")),
            qr6: j.map(|j| format!("{j} {a2}")),
        }
    }

    /// Query pair `k` (0..3) when both phrases exist.
    pub fn pair(&self, k: usize) -> Option<(&str, &str)> {
        match k {
            0 => Some((&self.qr1, &self.qr2)),
            1 => Some((self.qr3.as_deref()?, self.qr4.as_deref()?)),
            2 => Some((self.qr5.as_deref()?, self.qr6.as_deref()?)),
            _ => None,
        }
    }

    pub fn phrases(&self) -> Vec<&str> {
        (0..3).filter_map(|k| self.pair(k)).flat_map(|(a, b)| [a, b]).collect()
    }
}

fn lower_join<'a>(toks: impl Iterator<Item = &'a Token>) -> Option<String> {
    let words: Vec<String> = toks.filter(|t| t.is_word()).map(Token::lower).collect();
    (!words.is_empty()).then(|| words.join(" "))
}

/// Queries for `half`, with the candidates' head words or the given
/// replacement terms.
pub fn build_queries_with(a: &AnalyzedHalf, names: [&str; 2]) -> Option<QuerySet> {
    let q = &a.question_tokens;
    let q_verb = a
        .question_triples
        .iter()
        .flatten()
        .find(|t| t.is_relation())
        .map(|t| t.verb.index)
        .or_else(|| q.iter().find(|t| t.is_verbal()).map(|t| t.index));
    let (vq, w) = match q_verb {
        Some(v) => (q[v].lower(), lower_join(q[v + 1..].iter())),
        None => (a.pronoun_triple()?.verb.lower(), None),
    };
    let j = q
        .iter()
        .position(|t| t.pos == Pos::AuxVerb && t.lemma == "be")
        .and_then(|be| {
            q[be + 1..]
                .iter()
                .filter(|t| t.is_word())
                .find(|t| t.pos != Pos::Other)
                .filter(|t| t.pos == Pos::Adj)
        })
        .map(Token::lower);
    Some(QuerySet::new(names[0], names[1], &vq, w.as_deref(), j.as_deref()))
}

pub fn build_queries(a: &AnalyzedHalf) -> Option<QuerySet> {
    let (a1, a2) = (a.candidate_word(0)?, a.candidate_word(1)?);
    build_queries_with(a, [&a1, &a2])
}

/// Decision for one query pair: `diff = (ha - hb) / max(ha, hb, 1)`;
/// above `th` favours the first phrase, below `-th` the second.
pub fn pair_decision(ha: u64, hb: u64, th: f64) -> (i64, i64) {
    let diff = (ha as f64 - hb as f64) / (ha.max(hb).max(1) as f64);
    if diff > th {
        (1, 0)
    } else if diff < -th {
        (0, 1)
    } else {
        (0, 0)
    }
}

/// Plurality of the decided pairs; ties and no decisions give `(0, 0)`.
pub fn majority(decisions: &[(i64, i64)]) -> (i64, i64) {
    let first: i64 = decisions.iter().map(|d| d.0).sum();
    let second: i64 = decisions.iter().map(|d| d.1).sum();
    match first.cmp(&second) {
        std::cmp::Ordering::Greater => (1, 0),
        std::cmp::Ordering::Less => (0, 1),
        std::cmp::Ordering::Equal => (0, 0),
    }
}

/// Eight pair features (pairs 1-3 then the vote) and whether any pair was
/// decided from actual counts.
pub fn search_features(qs: Option<&QuerySet>, hits: &HitCountProvider, th: f64) -> ([i64; 8], bool) {
    let mut out = [0i64; 8];
    let Some(qs) = qs else {
        return (out, false);
    };
    let mut decisions = Vec::new();
    let mut covered = false;
    for k in 0..3 {
        let Some((pa, pb)) = qs.pair(k) else { continue };
        match (hits.hit_count(pa), hits.hit_count(pb)) {
            (Ok(ha), Ok(hb)) => {
                let d = pair_decision(ha, hb, th);
                out[2 * k] = d.0;
                out[2 * k + 1] = d.1;
                decisions.push(d);
                covered = true;
            }
            (ra, rb) => {
                for e in [ra.err(), rb.err()].into_iter().flatten() {
                    log::debug!("query pair {} undetermined: {e}", k + 1);
                }
            }
        }
    }
    let vote = majority(&decisions);
    out[6] = vote.0;
    out[7] = vote.1;
    (out, covered)
}
