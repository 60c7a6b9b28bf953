//! Tab-separated lookup tables: polarity lexicon, relatedness scores, frame
//! roles and sentiment scores. All lookups are total.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{data_lines, ResourceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Neutral,
    Positive,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
            Polarity::Positive => "positive",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "negative" => Some(Polarity::Negative),
            "neutral" => Some(Polarity::Neutral),
            "positive" => Some(Polarity::Positive),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Polarity::Negative => Polarity::Positive,
            Polarity::Neutral => Polarity::Neutral,
            Polarity::Positive => Polarity::Negative,
        }
    }
}

/// `lemma<TAB>negative|neutral|positive[<TAB>strength]`
#[derive(Debug, Clone, Default)]
pub struct PolarityLexicon {
    entries: HashMap<String, (Polarity, f64)>,
}

impl PolarityLexicon {
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut entries = HashMap::new();
        for (line, cols) in data_lines(text) {
            let err = |m: &str| ResourceError::parse("polarity lexicon", line, m);
            if cols.len() < 2 {
                return Err(err("expected lemma and polarity"));
            }
            let pol = Polarity::parse(cols[1]).ok_or_else(|| err("unknown polarity"))?;
            let strength = match cols.get(2) {
                Some(s) => s.parse::<f64>().map_err(|_| err("bad strength"))?,
                None => 1.0,
            };
            if !(0.0..=1.0).contains(&strength) {
                return Err(err("strength outside [0, 1]"));
            }
            entries.insert(cols[0].to_lowercase(), (pol, strength));
        }
        Ok(Self { entries })
    }

    pub fn insert(&mut self, lemma: &str, polarity: Polarity) {
        self.entries.insert(lemma.to_string(), (polarity, 1.0));
    }

    pub fn polarity_of(&self, lemma: &str) -> Polarity {
        self.entries.get(lemma).map_or(Polarity::Neutral, |e| e.0)
    }

    pub fn strength_of(&self, lemma: &str) -> f64 {
        self.entries.get(lemma).map_or(0.0, |e| e.1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `a<TAB>b<TAB>score`, symmetric. When both orders are listed with
/// different scores the larger one is kept.
#[derive(Debug, Clone, Default)]
pub struct RelatednessTable {
    pairs: HashMap<(String, String), f64>,
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl RelatednessTable {
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut t = Self::default();
        for (line, cols) in data_lines(text) {
            let err = |m: &str| ResourceError::parse("relatedness table", line, m);
            if cols.len() != 3 {
                return Err(err("expected a<TAB>b<TAB>score"));
            }
            let v: f64 = cols[2].parse().map_err(|_| err("bad score"))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(err("score outside [0, 1]"));
            }
            t.insert(&cols[0].to_lowercase(), &cols[1].to_lowercase(), v);
        }
        Ok(t)
    }

    pub fn insert(&mut self, a: &str, b: &str, score: f64) {
        let e = self.pairs.entry(pair_key(a, b)).or_insert(score);
        *e = e.max(score);
    }

    pub fn relatedness(&self, a: &str, b: &str) -> f64 {
        self.pairs.get(&pair_key(a, b)).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameRoles {
    pub ext: String,
    pub obj: String,
}

/// `verb<TAB>ext_role<TAB>obj_role`
#[derive(Debug, Clone, Default)]
pub struct FrameRoleTable {
    roles: BTreeMap<String, FrameRoles>,
}

impl FrameRoleTable {
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut roles = BTreeMap::new();
        for (line, cols) in data_lines(text) {
            if cols.len() != 3 || cols.iter().any(|c| c.is_empty()) {
                return Err(ResourceError::parse(
                    "frame-role table",
                    line,
                    "expected verb<TAB>ext<TAB>obj, all non-empty",
                ));
            }
            roles.insert(
                cols[0].to_lowercase(),
                FrameRoles {
                    ext: cols[1].to_string(),
                    obj: cols[2].to_string(),
                },
            );
        }
        Ok(Self { roles })
    }

    pub fn frame_roles_for(&self, verb: &str) -> Option<&FrameRoles> {
        self.roles.get(verb)
    }
}

/// `word<TAB>score` with scores in `[-1, 1]`.
#[derive(Debug, Clone, Default)]
pub struct SentimentScores {
    scores: HashMap<String, f64>,
}

impl SentimentScores {
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut scores = HashMap::new();
        for (line, cols) in data_lines(text) {
            let err = |m: &str| ResourceError::parse("sentiment scores", line, m);
            if cols.len() != 2 {
                return Err(err("expected word<TAB>score"));
            }
            let v: f64 = cols[1].parse().map_err(|_| err("bad score"))?;
            if !(-1.0..=1.0).contains(&v) {
                return Err(err("score outside [-1, 1]"));
            }
            scores.insert(cols[0].to_lowercase(), v);
        }
        Ok(Self { scores })
    }

    pub fn score(&self, word: &str) -> f64 {
        self.scores.get(word).copied().unwrap_or(0.0)
    }

    pub fn bucket(&self, word: &str, band: f64) -> Polarity {
        let s = self.score(word);
        if s.abs() < band {
            Polarity::Neutral
        } else if s > 0.0 {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarity_lookup() {
        let lex = PolarityLexicon::parse("# c\nrefuse\tnegative\t0.8\nadvocate\tpositive\n").unwrap();
        assert_eq!(lex.polarity_of("refuse"), Polarity::Negative);
        assert_eq!(lex.polarity_of("advocate"), Polarity::Positive);
        assert_eq!(lex.polarity_of("table"), Polarity::Neutral);
        assert_eq!(lex.strength_of("table"), 0.0);
        assert_eq!(lex.strength_of("refuse"), 0.8);
        assert!(PolarityLexicon::parse("x\tgood\n").is_err());
    }

    #[test]
    fn relatedness_is_symmetric() {
        let t = RelatednessTable::parse("cat\tclever\t0.4\nclever\tmouse\t0.2\nx\tx\t1\n").unwrap();
        assert_eq!(t.relatedness("clever", "cat"), 0.4);
        assert_eq!(t.relatedness("mouse", "clever"), 0.2);
        assert_eq!(t.relatedness("x", "x"), 1.0);
        assert_eq!(t.relatedness("dog", "cat"), 0.0);
        assert!(RelatednessTable::parse("a\tb\t1.5\n").is_err());
    }

    #[test]
    fn frames_and_sentiment() {
        let f = FrameRoleTable::parse("catch\tcaptor\tcaptive\n").unwrap();
        assert_eq!(f.frame_roles_for("catch").unwrap().obj, "captive");
        assert!(f.frame_roles_for("eat").is_none());
        assert!(FrameRoleTable::parse("catch\tcaptor\t\n").is_err());
        let s = SentimentScores::parse("refuse\t-0.4\nclever\t0.3\nok\t0.05\n").unwrap();
        assert_eq!(s.bucket("refuse", 0.1), Polarity::Negative);
        assert_eq!(s.bucket("clever", 0.1), Polarity::Positive);
        assert_eq!(s.bucket("ok", 0.1), Polarity::Neutral);
        assert_eq!(s.bucket("absent", 0.1), Polarity::Neutral);
    }
}
