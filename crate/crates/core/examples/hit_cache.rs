//! Fills a persistent hit-count cache with simulated counts, then extracts
//! features offline from it.
//!
//!     cargo run --example hit_cache

use std::sync::Arc;

use schema_hardness::features::{Component, ExtractionConfig, Feature, FeatureExtractor};
use schema_hardness::resources::{HitConfig, HitCountProvider, Resources};
use schema_hardness::synthetic::{generate, warm_hit_cache};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("schema-hardness-hits");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("hits.json");
    let halves: Vec<_> = generate(10, 6, "h").into_iter().map(|s| s.half).collect();

    let mut resources = Resources::empty();
    resources.hits = HitCountProvider::open(&path, HitConfig::default())?;
    let fx = FeatureExtractor::new(Arc::new(resources), ExtractionConfig::default())?;
    println!("{} phrases added to {}", warm_hit_cache(&fx, &halves)?, path.display());

    let mut reopened = Resources::empty();
    reopened.hits = HitCountProvider::open(&path, HitConfig::default())?;
    println!("{} phrases cached after reopening", reopened.hits.len());
    let fx = FeatureExtractor::new(Arc::new(reopened), ExtractionConfig::default())?;
    for h in &halves[..3] {
        let v = fx.extract(h);
        let block: Vec<i64> = Component::SearchQueries.features().into_iter().map(|f| v.int(f)).collect();
        println!("{}: {:?} (GL1 {} / {})", h.sentence, block, v.int(Feature::GL1i1), v.int(Feature::GL1i2));
    }
    Ok(())
}
