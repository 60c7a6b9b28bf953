//! File-backed knowledge providers: corpus frequency index, polarity lexicon,
//! narrative chains, relatedness table, frame roles, sentiment scores and
//! cached search hit counts.
//!
//! A resource directory may hold any subset of these files; missing files
//! give empty providers whose lookups return their documented defaults.
//!
//! | file | format |
//! |---|---|
//! | `corpus_index.json` | dump written by [`CorpusIndex::write_json`] |
//! | `corpus.txt` | one sentence per line (indexed on load if no dump exists) |
//! | `polarity.tsv` | `lemma  polarity  [strength]` |
//! | `chains.txt` | one chain per line, `verb-s` / `verb-o` tokens |
//! | `synonyms.tsv` | `word  syn,syn,...` |
//! | `relatedness.tsv` | `a  b  score` |
//! | `frames.tsv` | `verb  ext_role  obj_role` |
//! | `sentiment.tsv` | `word  score` |
//! | `hits.json` | `{"phrase": count, ...}` |
//! | `annotations.json` | parse annotations keyed by half id |

mod chains;
mod corpus;
mod hits;
mod lexicons;

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

pub use chains::{Chain, ChainEvent, NarrativeChainDb, MAX_CHAIN_LEN};
pub use corpus::{governor, CorpusIndex, Role, RuleExtractor, TripleExtractor, INDEX_VERSION};
pub use hits::{HitConfig, HitCountProvider};
pub use lexicons::{FrameRoleTable, FrameRoles, Polarity, PolarityLexicon, RelatednessTable, SentimentScores};

use crate::text::{self, ParseAnnotations};

#[derive(Debug, thiserror::Error)]
pub enum ResourceError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}, line {line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{what} version {found} is not supported (expected {expected})")]
    Version {
        what: &'static str,
        found: u32,
        expected: u32,
    },
    #[error("hit count for `{0}` is not cached and network lookups are disabled")]
    CacheMissOffline(String),
    #[error("hit-count lookup failed: {0}")]
    Network(String),
    #[error("empty search phrase")]
    EmptyPhrase,
}

impl ResourceError {
    pub(crate) fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub(crate) fn parse(file: &str, line: usize, message: impl ToString) -> Self {
        Self::Parse {
            file: file.to_string(),
            line,
            message: message.to_string(),
        }
    }
}

/// Tab-separated data rows with their 1-based line numbers; blank lines and
/// `#` comments are skipped.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let t = l.trim();
        (!t.is_empty() && !t.starts_with('#')).then(|| (i + 1, t.split('\t').map(str::trim).collect()))
    })
}

/// English (Porter2) stem of a lower-cased word.
pub fn stem(word: &str) -> String {
    static STEMMER: OnceLock<rust_stemmers::Stemmer> = OnceLock::new();
    STEMMER
        .get_or_init(|| rust_stemmers::Stemmer::create(rust_stemmers::Algorithm::English))
        .stem(word)
        .into_owned()
}

/// Every knowledge source the feature extractor consults.
#[derive(Debug)]
pub struct Resources {
    pub corpus: CorpusIndex,
    pub polarity: PolarityLexicon,
    pub chains: NarrativeChainDb,
    pub relatedness: RelatednessTable,
    pub frames: FrameRoleTable,
    pub sentiment: SentimentScores,
    pub hits: HitCountProvider,
    pub annotations: ParseAnnotations,
}

impl Default for Resources {
    fn default() -> Self {
        Self::empty()
    }
}

fn read_optional(dir: &Path, name: &str) -> Result<Option<String>, ResourceError> {
    let path = dir.join(name);
    match fs::read_to_string(&path) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(ResourceError::io(path, e)),
    }
}

impl Resources {
    /// Providers with no data and an in-memory, offline hit cache.
    pub fn empty() -> Self {
        Self {
            corpus: CorpusIndex::new(),
            polarity: PolarityLexicon::default(),
            chains: NarrativeChainDb::default(),
            relatedness: RelatednessTable::default(),
            frames: FrameRoleTable::default(),
            sentiment: SentimentScores::default(),
            hits: HitCountProvider::in_memory(Default::default(), HitConfig::default()),
            annotations: ParseAnnotations::new(),
        }
    }

    pub fn load_dir(dir: impl AsRef<Path>, hit_config: HitConfig) -> Result<Self, ResourceError> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(ResourceError::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "resource directory not found"),
            ));
        }
        let index_path = dir.join("corpus_index.json");
        let corpus = if index_path.exists() {
            let f = fs::File::open(&index_path).map_err(|e| ResourceError::io(&index_path, e))?;
            CorpusIndex::read_json(BufReader::new(f))?
        } else if let Some(text) = read_optional(dir, "corpus.txt")? {
            CorpusIndex::build(text.as_bytes(), &RuleExtractor)?
        } else {
            CorpusIndex::new()
        };
        let load = |name: &str| read_optional(dir, name).map(Option::unwrap_or_default);
        let chains = NarrativeChainDb::parse(&load("chains.txt")?)?.with_synonyms(&load("synonyms.tsv")?)?;
        let annotations = match read_optional(dir, "annotations.json")? {
            Some(s) => text::parse_annotations(&s).map_err(|e| ResourceError::parse("annotations.json", 0, e))?,
            None => ParseAnnotations::new(),
        };
        Ok(Self {
            corpus,
            polarity: PolarityLexicon::parse(&load("polarity.tsv")?)?,
            chains,
            relatedness: RelatednessTable::parse(&load("relatedness.tsv")?)?,
            frames: FrameRoleTable::parse(&load("frames.tsv")?)?,
            sentiment: SentimentScores::parse(&load("sentiment.tsv")?)?,
            hits: HitCountProvider::open(dir.join("hits.json"), hit_config)?,
            annotations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems() {
        assert_eq!(stem("refused"), stem("refuse"));
        assert_eq!(stem("advocates"), stem("advocate"));
        assert_eq!(stem("clever"), "clever");
    }

    #[test]
    fn missing_files_give_empty_providers() {
        let dir = tempfile::tempdir().unwrap();
        let r = Resources::load_dir(dir.path(), HitConfig::default()).unwrap();
        assert_eq!(r.corpus.doc_count(), 0);
        assert!(r.chains.is_empty());
        assert_eq!(r.polarity.polarity_of("refuse"), Polarity::Neutral);
        assert!(Resources::load_dir(dir.path().join("nope"), HitConfig::default()).is_err());
    }

    #[test]
    fn corpus_text_is_indexed_on_load() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("corpus.txt"), "The cat caught the mouse.\n").unwrap();
        fs::write(dir.path().join("polarity.tsv"), "refuse\tnegative\n").unwrap();
        let r = Resources::load_dir(dir.path(), HitConfig::default()).unwrap();
        assert_eq!(r.corpus.role_frequency("cat", Role::Subject), 1);
        assert_eq!(r.polarity.polarity_of("refuse"), Polarity::Negative);
    }
}
