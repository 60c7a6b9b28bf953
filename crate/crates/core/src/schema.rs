//! Schema halves, datasets, hardness labels, splitting and oversampling.
//!
//! The canonical on-disk form is a JSON array of records
//!
//! ```json
//! {"id": "wsc-1a", "source": "WSC-original", "sentence": "...", "question": "...",
//!  "answers": ["The cat", "The mouse"], "correct": 1, "hardness": 0.93, "respondents": 60}
//! ```
//!
//! with `correct`, `hardness` and `respondents` nullable. The CSV mirror has a
//! header row `id,source,sentence,question,answer1,answer2,correct,hardness,respondents`
//! where empty cells stand for null.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::text;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in record {record}: {message}")]
    Parse { record: usize, message: String },
    #[error("invalid schema half `{id}`: {reason}")]
    Validation { id: String, reason: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),
    #[error("every original half is excluded; nothing to oversample")]
    EmptyEligibleSet,
    #[error("target total {target} unreachable (allowed range {min}..={max})")]
    InvalidTarget { target: usize, min: usize, max: usize },
    #[error("unsupported dataset format `{0}`")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "WSC-original")]
    WscOriginal,
    #[serde(rename = "DPR")]
    Dpr,
    #[serde(rename = "other")]
    Other,
}

/// Human hardness label: the fraction of respondents who resolved the half
/// correctly. Higher values mean easier halves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardnessLabel {
    pub value: f64,
    pub respondent_count: u32,
}

impl HardnessLabel {
    pub fn from_responses(correct: u32, respondents: u32) -> Option<Self> {
        if respondents == 0 || correct > respondents {
            return None;
        }
        Some(Self {
            value: f64::from(correct) / f64::from(respondents),
            respondent_count: respondents,
        })
    }
}

/// One half of a Winograd schema.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaHalf {
    pub id: String,
    pub source: Source,
    pub sentence: String,
    pub question: String,
    /// The two candidate referents, in order (A1, A2).
    pub candidates: [String; 2],
    /// 1-based index of the correct candidate.
    pub correct: Option<u8>,
    pub hardness: Option<f64>,
    pub respondents: Option<u32>,
}

impl SchemaHalf {
    pub fn new(
        id: impl Into<String>,
        sentence: impl Into<String>,
        question: impl Into<String>,
        a1: impl Into<String>,
        a2: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            source: Source::Other,
            sentence: sentence.into(),
            question: question.into(),
            candidates: [a1.into(), a2.into()],
            correct: None,
            hardness: None,
            respondents: None,
        }
    }

    pub fn with_hardness(mut self, hardness: f64) -> Self {
        self.hardness = Some(hardness);
        self
    }

    pub fn label(&self) -> Option<HardnessLabel> {
        self.hardness.map(|value| HardnessLabel {
            value,
            respondent_count: self.respondents.unwrap_or(0),
        })
    }

    /// The same half with A1 and A2 exchanged (and `correct` remapped).
    pub fn swapped(&self) -> Self {
        let mut out = self.clone();
        out.candidates.swap(0, 1);
        out.correct = self.correct.map(|c| 3 - c);
        out
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let fail = |reason: &str| DatasetError::Validation {
            id: self.id.clone(),
            reason: reason.to_string(),
        };
        if self.id.trim().is_empty() {
            return Err(fail("empty id"));
        }
        if self.sentence.trim().is_empty() {
            return Err(fail("empty sentence"));
        }
        if self.question.trim().is_empty() {
            return Err(fail("empty question"));
        }
        let [a1, a2] = &self.candidates;
        if a1.trim().is_empty() || a2.trim().is_empty() {
            return Err(fail("missing candidate"));
        }
        if a1.trim().eq_ignore_ascii_case(a2.trim()) {
            return Err(fail("candidates are not distinct"));
        }
        if let Some(c) = self.correct {
            if c != 1 && c != 2 {
                return Err(fail("correct must be 1 or 2"));
            }
        }
        if let Some(h) = self.hardness {
            if !(0.0..=1.0).contains(&h) {
                return Err(fail("hardness outside [0, 1]"));
            }
        }
        let sentence = word_forms(&self.sentence);
        for cand in &self.candidates {
            let words = word_forms(cand);
            if find_span(&sentence, &words).is_none() {
                return Err(fail(&format!("candidate `{cand}` does not occur in the sentence")));
            }
        }
        Ok(())
    }
}

fn word_forms(s: &str) -> Vec<String> {
    text::tokenize(s)
        .map(|toks| {
            toks.into_iter()
                .filter(|t| t.is_word())
                .map(|t| t.surface.to_lowercase())
                .collect()
        })
        .unwrap_or_default()
}

/// First position at which `needle` occurs as a contiguous run in `haystack`.
pub(crate) fn find_span<S: AsRef<str>>(haystack: &[S], needle: &[S]) -> Option<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return None;
    }
    (0..=haystack.len() - needle.len()).find(|&i| {
        needle
            .iter()
            .zip(&haystack[i..])
            .all(|(a, b)| a.as_ref() == b.as_ref())
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub halves: Vec<SchemaHalf>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(halves: Vec<SchemaHalf>, provenance: impl Into<String>) -> Result<Self, DatasetError> {
        let d = Self {
            halves,
            provenance: provenance.into(),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.halves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halves.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.halves.iter().map(|h| h.id.clone()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&SchemaHalf> {
        self.halves.iter().find(|h| h.id == id)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let mut seen = HashSet::new();
        for h in &self.halves {
            h.validate()?;
            if !seen.insert(h.id.as_str()) {
                return Err(DatasetError::DuplicateId(h.id.clone()));
            }
        }
        Ok(())
    }

    fn subset(&self, idx: &[usize], tag: &str) -> Dataset {
        Dataset {
            halves: idx.iter().map(|&i| self.halves[i].clone()).collect(),
            provenance: format!("{} [{tag}]", self.provenance),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Json,
    Csv,
}

impl DataFormat {
    pub fn from_path(path: &Path) -> Result<Self, DatasetError> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Ok(Self::Json),
            Some(e) if e.eq_ignore_ascii_case("csv") => Ok(Self::Csv),
            other => Err(DatasetError::UnknownFormat(other.unwrap_or("").to_string())),
        }
    }
}

impl std::str::FromStr for DataFormat {
    type Err = DatasetError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(DatasetError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRecord {
    id: String,
    source: Source,
    sentence: String,
    question: String,
    answers: Vec<String>,
    correct: Option<u8>,
    hardness: Option<f64>,
    respondents: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRecord {
    id: String,
    source: Source,
    sentence: String,
    question: String,
    answer1: String,
    answer2: String,
    correct: Option<u8>,
    hardness: Option<f64>,
    respondents: Option<u32>,
}

fn record_to_half(rec: JsonRecord, index: usize) -> Result<SchemaHalf, DatasetError> {
    if rec.answers.len() != 2 {
        return Err(DatasetError::Validation {
            id: rec.id,
            reason: format!("expected exactly two answers, found {} (record {index})", rec.answers.len()),
        });
    }
    let mut answers = rec.answers.into_iter();
    let a1 = answers.next().unwrap_or_default();
    let a2 = answers.next().unwrap_or_default();
    Ok(SchemaHalf {
        id: rec.id,
        source: rec.source,
        sentence: rec.sentence,
        question: rec.question,
        candidates: [a1, a2],
        correct: rec.correct,
        hardness: rec.hardness,
        respondents: rec.respondents,
    })
}

pub fn parse_json(content: &str) -> Result<Vec<SchemaHalf>, DatasetError> {
    if content.trim().is_empty() {
        return Ok(Vec::new());
    }
    let values: Vec<serde_json::Value> = serde_json::from_str(content).map_err(|e| DatasetError::Parse {
        record: 0,
        message: format!("line {} column {}: {e}", e.line(), e.column()),
    })?;
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let rec: JsonRecord = serde_json::from_value(v).map_err(|e| DatasetError::Parse {
                record: i,
                message: e.to_string(),
            })?;
            record_to_half(rec, i)
        })
        .collect()
}

pub fn parse_csv(content: &str) -> Result<Vec<SchemaHalf>, DatasetError> {
    if content.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(content.as_bytes());
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<CsvRecord>().enumerate() {
        let rec = row.map_err(|e| DatasetError::Parse {
            record: i,
            message: e.to_string(),
        })?;
        out.push(SchemaHalf {
            id: rec.id,
            source: rec.source,
            sentence: rec.sentence,
            question: rec.question,
            candidates: [rec.answer1, rec.answer2],
            correct: rec.correct,
            hardness: rec.hardness,
            respondents: rec.respondents,
        });
    }
    Ok(out)
}

/// Loads and validates a dataset. Record order is preserved.
pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let halves = match format {
        DataFormat::Json => parse_json(&content)?,
        DataFormat::Csv => parse_csv(&content)?,
    };
    Dataset::new(halves, path.display().to_string())
}

pub fn to_canonical_json(dataset: &Dataset) -> String {
    let records: Vec<JsonRecord> = dataset
        .halves
        .iter()
        .map(|h| JsonRecord {
            id: h.id.clone(),
            source: h.source,
            sentence: h.sentence.clone(),
            question: h.question.clone(),
            answers: h.candidates.to_vec(),
            correct: h.correct,
            hardness: h.hardness,
            respondents: h.respondents,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&records).expect("dataset records serialize");
    s.push('\n');
    s
}

pub fn to_csv(dataset: &Dataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for h in &dataset.halves {
        w.serialize(CsvRecord {
            id: h.id.clone(),
            source: h.source,
            sentence: h.sentence.clone(),
            question: h.question.clone(),
            answer1: h.candidates[0].clone(),
            answer2: h.candidates[1].clone(),
            correct: h.correct,
            hardness: h.hardness,
            respondents: h.respondents,
        })
        .expect("csv rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>, format: DataFormat) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let body = match format {
        DataFormat::Json => to_canonical_json(dataset),
        DataFormat::Csv => to_csv(dataset),
    };
    fs::write(path, body).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads an id-list file: one id per line, `#` comments and blank lines ignored.
pub fn read_id_list(path: impl AsRef<Path>) -> Result<Vec<String>, DatasetError> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

/// Random train/test partition. The test side has `round(n * test_fraction)`
/// halves; both sides keep the input order.
pub fn split_train_test(d: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset), DatasetError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(DatasetError::DegenerateSplit(format!(
            "test fraction {test_fraction} outside (0, 1)"
        )));
    }
    let n = d.len();
    let n_test = (n as f64 * test_fraction).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(DatasetError::DegenerateSplit(format!(
            "{n} halves with fraction {test_fraction} leaves an empty side"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test: Vec<usize> = order[..n_test].to_vec();
    let mut train: Vec<usize> = order[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((d.subset(&train, "train"), d.subset(&test, "test")))
}

/// Deterministic split from an explicit list of test ids.
pub fn split_by_ids(d: &Dataset, test_ids: &[String]) -> Result<(Dataset, Dataset), DatasetError> {
    let wanted: HashSet<&str> = test_ids.iter().map(String::as_str).collect();
    let known: HashSet<&str> = d.halves.iter().map(|h| h.id.as_str()).collect();
    if let Some(missing) = test_ids.iter().find(|id| !known.contains(id.as_str())) {
        return Err(DatasetError::Validation {
            id: missing.clone(),
            reason: "test id not present in dataset".into(),
        });
    }
    let (test, train): (Vec<usize>, Vec<usize>) =
        (0..d.len()).partition(|&i| wanted.contains(d.halves[i].id.as_str()));
    if test.is_empty() || train.is_empty() {
        return Err(DatasetError::DegenerateSplit("id list leaves an empty side".into()));
    }
    Ok((d.subset(&train, "train"), d.subset(&test, "test")))
}

/// Replication factor used by [`oversample_balance`]: `round(dpr / eligible)`,
/// at least 1.
pub fn replication_factor(dpr_len: usize, eligible_len: usize) -> usize {
    if eligible_len == 0 {
        return 1;
    }
    ((dpr_len as f64 / eligible_len as f64).round() as usize).max(1)
}

/// Balances a small original dataset against a larger one by replicating the
/// non-excluded original halves `k` times.
///
/// The first copy keeps its id; further copies are suffixed `#rep-n`. With a
/// `target_total`, surplus copies are dropped round-robin (the highest
/// replica of each half in turn) until the size matches exactly.
pub fn oversample_balance(
    original: &Dataset,
    dpr: &Dataset,
    excluded_ids: &BTreeSet<String>,
    target_total: Option<usize>,
) -> Result<Dataset, DatasetError> {
    for id in excluded_ids {
        if original.get(id).is_none() {
            return Err(DatasetError::Validation {
                id: id.clone(),
                reason: "excluded id not present in the original dataset".into(),
            });
        }
    }
    for h in original.halves.iter().chain(&dpr.halves) {
        if h.hardness.is_none() {
            return Err(DatasetError::Validation {
                id: h.id.clone(),
                reason: "unlabeled half cannot be oversampled".into(),
            });
        }
    }
    let eligible: Vec<&SchemaHalf> = original
        .halves
        .iter()
        .filter(|h| !excluded_ids.contains(&h.id))
        .collect();
    if eligible.is_empty() {
        return Err(DatasetError::EmptyEligibleSet);
    }
    let k = replication_factor(dpr.len(), eligible.len());

    // copies[i] = number of replicas kept for eligible[i]
    let mut copies = vec![k; eligible.len()];
    let natural = dpr.len() + k * eligible.len();
    if let Some(target) = target_total {
        let min = dpr.len() + eligible.len();
        if target < min || target > natural {
            return Err(DatasetError::InvalidTarget {
                target,
                min,
                max: natural,
            });
        }
        let mut surplus = natural - target;
        let mut i = 0;
        while surplus > 0 {
            if copies[i] > 1 {
                copies[i] -= 1;
                surplus -= 1;
            }
            i = (i + 1) % copies.len();
        }
    }

    let mut halves = dpr.halves.clone();
    for (half, &n) in eligible.iter().zip(&copies) {
        for rep in 0..n {
            let mut copy = (*half).clone();
            if rep > 0 {
                copy.id = format!("{}#rep-{rep}", half.id);
            }
            halves.push(copy);
        }
    }
    Dataset::new(
        halves,
        format!("oversampled: {} + {} x{k}", dpr.provenance, original.provenance),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(id: &str) -> SchemaHalf {
        SchemaHalf::new(
            id,
            "The cat caught the mouse because it was clever.",
            "Who is clever?",
            "The cat",
            "The mouse",
        )
        .with_hardness(0.9)
    }

    fn dataset(prefix: &str, n: usize) -> Dataset {
        Dataset::new((0..n).map(|i| half(&format!("{prefix}{i}"))).collect(), prefix).unwrap()
    }

    #[test]
    fn validation_rejects_missing_candidate() {
        let mut h = half("x1");
        h.candidates[1] = String::new();
        match h.validate() {
            Err(DatasetError::Validation { id, .. }) => assert_eq!(id, "x1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_rejects_absent_candidate_and_bad_label() {
        let mut h = half("x");
        h.candidates[1] = "The dog".into();
        assert!(h.validate().is_err());
        let h = half("y").with_hardness(1.2);
        assert!(h.validate().is_err());
        let mut h = half("z");
        h.candidates[1] = "the CAT".into();
        assert!(h.validate().is_err(), "candidates must be distinct");
    }

    #[test]
    fn json_missing_answer_names_the_id() {
        let body = r#"[{"id":"h7","source":"DPR","sentence":"The cat ran.","question":"Who ran?",
            "answers":["The cat"],"correct":null,"hardness":null,"respondents":null}]"#;
        let err = parse_json(body).unwrap_err();
        assert!(err.to_string().contains("h7"), "{err}");
    }

    #[test]
    fn empty_file_is_an_empty_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.json");
        fs::write(&p, "").unwrap();
        assert!(load_dataset(&p, DataFormat::Json).unwrap().is_empty());
        let p = dir.path().join("e.csv");
        fs::write(&p, "").unwrap();
        assert!(load_dataset(&p, DataFormat::Csv).unwrap().is_empty());
    }

    #[test]
    fn canonical_json_round_trips_byte_for_byte() {
        let mut d = dataset("w", 3);
        d.halves[1].correct = Some(2);
        d.halves[2].hardness = None;
        d.halves[0].respondents = Some(40);
        let first = to_canonical_json(&d);
        let again = to_canonical_json(&Dataset::new(parse_json(&first).unwrap(), "").unwrap());
        assert_eq!(first, again);
        let csv = to_csv(&d);
        assert_eq!(parse_csv(&csv).unwrap(), d.halves);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = Dataset::new(vec![half("a"), half("a")], "").unwrap_err();
        assert!(matches!(err, DatasetError::DuplicateId(_)));
    }

    #[test]
    fn split_sizes_follow_rounding() {
        let d = dataset("w", 286);
        let (train, test) = split_train_test(&d, 0.3, 11).unwrap();
        assert_eq!((train.len(), test.len()), (200, 86));
        let (_, test) = split_train_test(&d, 0.3497, 11).unwrap();
        assert_eq!(test.len(), 100);
        assert!(matches!(
            split_train_test(&dataset("w", 1), 0.3, 1),
            Err(DatasetError::DegenerateSplit(_))
        ));
    }

    #[test]
    fn split_matches_reference_shuffle() {
        let d = dataset("w", 286);
        let (_, test) = split_train_test(&d, 0.3, 42).unwrap();
        let mut order: Vec<usize> = (0..286).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(42));
        let mut expected: Vec<String> = order[..86].iter().map(|i| format!("w{i}")).collect();
        expected.sort_by_key(|id| id[1..].parse::<usize>().unwrap());
        assert_eq!(test.ids(), expected);
    }

    #[test]
    fn split_by_ids_is_exact() {
        let d = dataset("w", 10);
        let ids = vec!["w2".to_string(), "w5".to_string()];
        let (train, test) = split_by_ids(&d, &ids).unwrap();
        assert_eq!(test.ids(), ids);
        assert_eq!(train.len(), 8);
        assert!(split_by_ids(&d, &["nope".to_string()]).is_err());
    }

    #[test]
    fn oversampling_identity_when_dpr_empty() {
        let orig = dataset("o", 5);
        let out = oversample_balance(&orig, &Dataset::default(), &BTreeSet::new(), None).unwrap();
        assert_eq!(out.halves, orig.halves);
    }

    #[test]
    fn oversampling_errors() {
        let orig = dataset("o", 3);
        let all: BTreeSet<String> = orig.ids().into_iter().collect();
        assert!(matches!(
            oversample_balance(&orig, &Dataset::default(), &all, None),
            Err(DatasetError::EmptyEligibleSet)
        ));
        let bogus: BTreeSet<String> = ["zz".to_string()].into();
        assert!(oversample_balance(&orig, &Dataset::default(), &bogus, None).is_err());
    }

    #[test]
    fn oversampling_trims_round_robin() {
        let orig = dataset("o", 4);
        let dpr = dataset("d", 8);
        // k = 2 -> natural size 8 + 8 = 16
        let out = oversample_balance(&orig, &dpr, &BTreeSet::new(), Some(14)).unwrap();
        assert_eq!(out.len(), 14);
        let reps: Vec<_> = out.ids().into_iter().filter(|id| id.contains("#rep")).collect();
        assert_eq!(reps, vec!["o2#rep-1", "o3#rep-1"]);
    }

    #[test]
    fn hardness_label_from_counts() {
        let l = HardnessLabel::from_responses(45, 50).unwrap();
        assert_eq!(l.value, 0.9);
        assert!(HardnessLabel::from_responses(1, 0).is_none());
    }
}
