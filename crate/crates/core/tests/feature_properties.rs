use std::sync::Arc;

use proptest::prelude::*;

use schema_hardness::features::{pair_decision, Component, ExtractionConfig, Feature, FeatureExtractor};
use schema_hardness::resources::Resources;
use schema_hardness::synthetic::{generate, warm_hit_cache};
use schema_hardness::SchemaHalf;

fn warmed(halves: &[SchemaHalf], threshold: f64) -> FeatureExtractor {
    let cfg = ExtractionConfig { threshold, ..Default::default() };
    let fx = FeatureExtractor::new(Arc::new(Resources::empty()), cfg).unwrap();
    warm_hit_cache(&fx, halves).unwrap();
    fx
}

fn swapped(h: &SchemaHalf) -> SchemaHalf {
    let mut s = h.clone();
    s.candidates.swap(0, 1);
    s.correct = h.correct.map(|c| 3 - c);
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pair_decisions_are_exclusive_and_antisymmetric(a in 0u64..10_000, b in 0u64..10_000, th in 0.0f64..1.0) {
        let (x, y) = pair_decision(a, b, th);
        prop_assert!(x + y <= 1 && x >= 0 && y >= 0);
        prop_assert_eq!(pair_decision(b, a, th), (y, x));
    }

    #[test]
    fn higher_threshold_never_decides_more(a in 0u64..10_000, b in 0u64..10_000, lo in 0.0f64..1.0, d in 0.0f64..1.0) {
        let (x, y) = pair_decision(a, b, lo + d);
        let (p, q) = pair_decision(a, b, lo);
        prop_assert!(x <= p && y <= q);
    }

    #[test]
    fn extraction_is_deterministic_and_search_pairs_exclusive(seed in 0u64..1000) {
        let halves: Vec<SchemaHalf> = generate(4, seed, "p").into_iter().map(|s| s.half).collect();
        let fx = warmed(&halves, 0.2);
        for h in &halves {
            let v = fx.extract(h);
            prop_assert_eq!(&v, &fx.extract(h));
            for f in Component::SearchQueries.features() {
                if let Some(p) = f.pair_partner() {
                    prop_assert!(v.int(f) + v.int(p) <= 1, "{} and {} both set for {}", f, p, h.sentence);
                }
            }
        }
    }

    #[test]
    fn swapping_candidates_swaps_search_decisions(seed in 0u64..1000) {
        let halves: Vec<SchemaHalf> = generate(3, seed, "s").into_iter().map(|s| s.half).collect();
        let both: Vec<SchemaHalf> = halves.iter().flat_map(|h| [h.clone(), swapped(h)]).collect();
        let fx = warmed(&both, 0.2);
        for h in &halves {
            let (v, w) = (fx.extract(h), fx.extract(&swapped(h)));
            for f in Component::SearchQueries.features() {
                let p = f.pair_partner().unwrap();
                prop_assert_eq!(v.int(f), w.int(p), "{} on {}", f, h.sentence);
            }
            for f in [Feature::SL, Feature::STN, Feature::QTN] {
                prop_assert_eq!(v.int(f), w.int(f));
            }
            prop_assert_eq!(v.cat(Feature::SP), w.cat(Feature::SP));
        }
    }

    #[test]
    fn raising_the_threshold_never_adds_search_decisions(seed in 0u64..1000, lo in 0.0f64..0.5, d in 0.0f64..0.5) {
        let halves: Vec<SchemaHalf> = generate(3, seed, "t").into_iter().map(|s| s.half).collect();
        let (loose, strict) = (warmed(&halves, lo), warmed(&halves, lo + d));
        let pairs = [Feature::GL1i1, Feature::GL1i2, Feature::GL2i1, Feature::GL2i2, Feature::GL3i1, Feature::GL3i2];
        for h in &halves {
            let (a, b) = (loose.extract(h), strict.extract(h));
            for f in pairs {
                prop_assert!(b.int(f) <= a.int(f), "{} on {}", f, h.sentence);
            }
        }
    }
}
