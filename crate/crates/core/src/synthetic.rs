//! Template-generated schema halves with labels that are a known noisy
//! function of three features (sentence length, negation of the candidates'
//! clause, sentence type), plus simulated hit counts for warming a cache.
//!
//! Used where real labelled data or live search counts are unavailable:
//! end-to-end checks, benchmarks and the examples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::features::FeatureExtractor;
use crate::resources::ResourceError;
use crate::schema::{Dataset, SchemaHalf};
use crate::text::SentenceType;

const PEOPLE: [(&str, &str); 8] = [
    ("the lawyer", "the witness"),
    ("the teacher", "the student"),
    ("the doctor", "the patient"),
    ("the farmer", "the thief"),
    ("the king", "the guard"),
    ("the man", "the boy"),
    ("the woman", "the girl"),
    ("the student", "the farmer"),
];
const ANIMALS: [(&str, &str); 3] = [("the cat", "the mouse"), ("the dog", "the rabbit"), ("the dog", "the cat")];
/// (past, base)
const VERBS: [(&str, &str); 12] = [
    ("caught", "catch"),
    ("chased", "chase"),
    ("helped", "help"),
    ("warned", "warn"),
    ("thanked", "thank"),
    ("called", "call"),
    ("visited", "visit"),
    ("paid", "pay"),
    ("admired", "admire"),
    ("blamed", "blame"),
    ("praised", "praise"),
    ("hired", "hire"),
];
const ADJECTIVES: [&str; 14] = [
    "clever", "tired", "angry", "hungry", "afraid", "rich", "weak", "strong", "busy", "happy", "sad", "poor", "brave",
    "lazy",
];
const PLACES: [&str; 9] = [
    "in the garden",
    "near the old bridge",
    "at the station",
    "behind the house",
    "on the road",
    "in the small village",
    "near the river",
    "at the market",
    "in the park",
];
const OBJECTS: [&str; 4] = ["money", "letter", "book", "dinner"];

/// A generated half with the feature values its label was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticHalf {
    pub half: SchemaHalf,
    pub sentence_length: usize,
    pub negated: bool,
    pub sentence_type: SentenceType,
}

/// Noise-free label: starts at 0.98 and drops with length, negation of the
/// candidates' clause and sentence complexity.
pub fn hardness_function(sentence_length: usize, negated: bool, sentence_type: SentenceType) -> f64 {
    let st = match sentence_type {
        SentenceType::Compound => 0.05,
        SentenceType::CompoundComplex => 0.10,
        _ => 0.0,
    };
    0.98 - 0.015 * (sentence_length as f64 - 8.0) - if negated { 0.12 } else { 0.0 } - st
}

/// Half-width of the uniform label noise.
pub const LABEL_NOISE: f64 = 0.04;

fn pick<'a, T, R: Rng>(rng: &mut R, xs: &'a [T]) -> &'a T {
    xs.choose(rng).expect("non-empty table")
}

fn one<R: Rng>(rng: &mut R, id: String) -> SyntheticHalf {
    let (a, b) = if rng.gen_bool(0.3) { *pick(rng, &ANIMALS) } else { *pick(rng, &PEOPLE) };
    let pronoun = if ANIMALS.iter().any(|p| p.0 == a) { "it" } else { "he" };
    let (past, base) = *pick(rng, &VERBS);
    let negated = rng.gen_bool(0.3);
    let adj = *pick(rng, &ADJECTIVES);
    let mut sentence = if negated {
        format!("{a} did not {base} {b}")
    } else {
        format!("{a} {past} {b}")
    };
    for _ in 0..rng.gen_range(0..=3) {
        sentence.push(' ');
        sentence.push_str(pick(rng, &PLACES));
    }
    let sentence_type = *pick(rng, &[SentenceType::Complex, SentenceType::Compound, SentenceType::CompoundComplex]);
    match sentence_type {
        SentenceType::Complex => {
            let sub = pick(rng, &["because", "although", "since"]);
            sentence.push_str(&format!(" {sub} {pronoun} was {adj}."));
        }
        SentenceType::Compound => {
            let coord = pick(rng, &["but", "and", "so"]);
            sentence.push_str(&format!(" {coord} {pronoun} was {adj}."));
        }
        _ => {
            let (p2, _) = *pick(rng, &VERBS);
            let obj = pick(rng, &OBJECTS);
            sentence.push_str(&format!(" and {pronoun} {p2} the {obj} because {pronoun} was {adj}."));
        }
    }
    let mut chars = sentence.chars();
    let sentence: String = chars.next().map(|c| c.to_ascii_uppercase()).into_iter().chain(chars).collect();
    let sentence_length = sentence.split_whitespace().count();
    let label = (hardness_function(sentence_length, negated, sentence_type) + rng.gen_range(-LABEL_NOISE..LABEL_NOISE)).clamp(0.0, 1.0);
    let mut half = SchemaHalf::new(id, sentence, format!("Who was {adj}?"), a, b).with_hardness(label);
    half.correct = Some(rng.gen_range(1..=2));
    SyntheticHalf {
        half,
        sentence_length,
        negated,
        sentence_type,
    }
}

/// `n` halves with ids `<prefix>-0`, `<prefix>-1`, ...
pub fn generate(n: usize, seed: u64, prefix: &str) -> Vec<SyntheticHalf> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| one(&mut rng, format!("{prefix}-{i}"))).collect()
}

pub fn synthetic_dataset(n: usize, seed: u64, prefix: &str) -> Dataset {
    Dataset::new(
        generate(n, seed, prefix).into_iter().map(|s| s.half).collect(),
        format!("synthetic ({n} halves, seed {seed})"),
    )
    .expect("generated halves are valid")
}

/// Deterministic stand-in for a search hit count, derived from an FNV-1a
/// hash of the phrase.
pub fn simulated_hit_count(phrase: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in phrase.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h % 5000
}

/// Stores a simulated count for every phrase extraction of `halves` would
/// look up and that is not cached yet. Returns the number of new entries.
pub fn warm_hit_cache(fx: &FeatureExtractor, halves: &[SchemaHalf]) -> Result<usize, ResourceError> {
    let hits = &fx.resources().hits;
    let mut added = 0;
    for h in halves {
        for phrase in fx.query_phrases(h) {
            if hits.cached(&phrase).is_none() {
                hits.store(&phrase, simulated_hit_count(&phrase))?;
                added += 1;
            }
        }
    }
    Ok(added)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{ExtractionConfig, Feature};
    use crate::resources::Resources;
    use std::sync::Arc;

    #[test]
    fn generated_halves_validate_and_are_deterministic() {
        let a = generate(200, 3, "s");
        assert_eq!(a, generate(200, 3, "s"));
        let d = synthetic_dataset(200, 3, "s");
        assert_eq!(d.len(), 200);
        assert!(d.halves.iter().all(|h| h.hardness.is_some_and(|y| (0.0..=1.0).contains(&y))));
    }

    #[test]
    fn extracted_features_match_generator() {
        let fx = FeatureExtractor::new(Arc::new(Resources::empty()), ExtractionConfig::default()).unwrap();
        for s in generate(150, 9, "s") {
            let v = fx.extract(&s.half);
            assert_eq!(v.int(Feature::SL), s.sentence_length as i64, "{}", s.half.sentence);
            assert_eq!(v.int(Feature::STN), i64::from(s.negated), "{}", s.half.sentence);
            assert_eq!(v.cat(Feature::ST), s.sentence_type.as_str(), "{}", s.half.sentence);
        }
    }

    #[test]
    fn labels_follow_the_function() {
        for s in generate(100, 4, "s") {
            let y = s.half.hardness.unwrap();
            let f = hardness_function(s.sentence_length, s.negated, s.sentence_type).clamp(0.0, 1.0);
            assert!((y - f).abs() <= LABEL_NOISE + 1e-12);
        }
    }

    #[test]
    fn warming_fills_every_phrase() {
        let fx = FeatureExtractor::new(Arc::new(Resources::empty()), ExtractionConfig::default()).unwrap();
        let halves: Vec<SchemaHalf> = generate(20, 1, "s").into_iter().map(|s| s.half).collect();
        let added = warm_hit_cache(&fx, &halves).unwrap();
        assert!(added > 0);
        assert_eq!(warm_hit_cache(&fx, &halves).unwrap(), 0);
        let v = fx.extract(&halves[0]);
        assert!(v.coverage.get(crate::features::Component::SearchQueries));
        assert_eq!(simulated_hit_count("cat was"), simulated_hit_count("cat was"));
    }
}
