use std::collections::{HashMap, HashSet};

use super::corpus::Role;
use super::{data_lines, stem, ResourceError};

pub const MAX_CHAIN_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainEvent {
    pub verb: String,
    pub role: Role,
}

impl ChainEvent {
    pub fn new(verb: &str, role: Role) -> Self {
        Self {
            verb: verb.to_string(),
            role,
        }
    }
}

pub type Chain = Vec<ChainEvent>;

/// Narrative chains, one per line as whitespace-separated `verb-s` /
/// `verb-o` tokens, plus an optional synonym table used when an exact lookup
/// finds nothing.
#[derive(Debug, Clone, Default)]
pub struct NarrativeChainDb {
    chains: Vec<Chain>,
    synonyms: HashMap<String, HashSet<String>>,
}

fn parse_event(tok: &str) -> Option<ChainEvent> {
    let (verb, role) = tok.rsplit_once('-')?;
    let role = match role {
        "s" => Role::Subject,
        "o" => Role::Object,
        _ => return None,
    };
    (!verb.is_empty()).then(|| ChainEvent::new(&verb.to_lowercase(), role))
}

impl NarrativeChainDb {
    pub fn parse(text: &str) -> Result<Self, ResourceError> {
        let mut chains = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let chain: Option<Chain> = l.split_whitespace().map(parse_event).collect();
            let chain = chain.ok_or_else(|| {
                ResourceError::parse("narrative chains", i + 1, "events must look like verb-s or verb-o")
            })?;
            if chain.len() > MAX_CHAIN_LEN {
                return Err(ResourceError::parse(
                    "narrative chains",
                    i + 1,
                    format!("chain longer than {MAX_CHAIN_LEN} events"),
                ));
            }
            chains.push(chain);
        }
        Ok(Self {
            chains,
            synonyms: HashMap::new(),
        })
    }

    /// Synonym rows: `word<TAB>syn1,syn2,...`; the relation is made symmetric.
    pub fn with_synonyms(mut self, text: &str) -> Result<Self, ResourceError> {
        for (line, cols) in data_lines(text) {
            if cols.len() != 2 {
                return Err(ResourceError::parse("synonyms", line, "expected word<TAB>syn,syn"));
            }
            let w = cols[0].to_lowercase();
            for s in cols[1].split(',').map(|s| s.trim().to_lowercase()).filter(|s| !s.is_empty()) {
                self.synonyms.entry(w.clone()).or_default().insert(s.clone());
                self.synonyms.entry(s).or_default().insert(w.clone());
            }
        }
        Ok(self)
    }

    pub fn push(&mut self, chain: Chain) {
        self.chains.push(chain);
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    fn find(&self, e1: &ChainEvent, e2: &ChainEvent, same: impl Fn(&str, &str) -> bool) -> Vec<&Chain> {
        let hit = |c: &Chain, e: &ChainEvent| c.iter().any(|x| x.role == e.role && same(&x.verb, &e.verb));
        self.chains.iter().filter(|c| hit(c, e1) && hit(c, e2)).collect()
    }

    /// Chains holding both events. With `similarity_fallback`, an empty exact
    /// result is retried on stems, then on synonyms.
    pub fn chains_containing(&self, e1: &ChainEvent, e2: &ChainEvent, similarity_fallback: bool) -> Vec<&Chain> {
        let exact = self.find(e1, e2, |a, b| a == b);
        if !exact.is_empty() || !similarity_fallback {
            return exact;
        }
        let stemmed = self.find(e1, e2, |a, b| stem(a) == stem(b));
        if !stemmed.is_empty() {
            return stemmed;
        }
        self.find(e1, e2, |a, b| {
            a == b || stem(a) == stem(b) || self.synonyms.get(b).is_some_and(|s| s.contains(a))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_lookup() {
        let db = NarrativeChainDb::parse("# chains\nrefuse-o advocate-s arrest-o\nbuy-s pay-s\n").unwrap();
        let r = db.chains_containing(
            &ChainEvent::new("refuse", Role::Object),
            &ChainEvent::new("advocate", Role::Subject),
            false,
        );
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].len(), 3);
        let none = db.chains_containing(
            &ChainEvent::new("refuse", Role::Subject),
            &ChainEvent::new("advocate", Role::Subject),
            true,
        );
        assert!(none.is_empty());
    }

    #[test]
    fn empty_db() {
        let db = NarrativeChainDb::default();
        let e = ChainEvent::new("refuse", Role::Object);
        assert!(db.chains_containing(&e, &e, true).is_empty());
    }

    #[test]
    fn stem_and_synonym_fallback() {
        let db = NarrativeChainDb::parse("refused-o advocates-s\n").unwrap();
        let (a, b) = (
            ChainEvent::new("refuse", Role::Object),
            ChainEvent::new("advocate", Role::Subject),
        );
        assert!(db.chains_containing(&a, &b, false).is_empty());
        assert_eq!(db.chains_containing(&a, &b, true).len(), 1);

        let db = NarrativeChainDb::parse("deny-o support-s\n")
            .unwrap()
            .with_synonyms("refuse\tdeny,decline\nadvocate\tsupport\n")
            .unwrap();
        assert_eq!(db.chains_containing(&a, &b, true).len(), 1);
        assert!(db.chains_containing(&a, &b, false).is_empty());
    }

    #[test]
    fn malformed_chains() {
        assert!(NarrativeChainDb::parse("refuse advocate-s\n").is_err());
        let long: Vec<String> = (0..13).map(|i| format!("v{i}-s")).collect();
        assert!(NarrativeChainDb::parse(&long.join(" ")).is_err());
    }
}
