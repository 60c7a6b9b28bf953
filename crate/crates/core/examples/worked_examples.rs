//! Extracts features for the bundled worked examples and prints the most
//! telling ones.
//!
//!     cargo run --example worked_examples

use std::path::PathBuf;
use std::sync::Arc;

use schema_hardness::features::{build_queries, ExtractionConfig, Feature, FeatureExtractor};
use schema_hardness::resources::{HitConfig, Resources};
use schema_hardness::schema::{load_dataset, DataFormat};
use schema_hardness::text::{classify_sentence, extract_triples};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let data = load_dataset(root.join("data/worked.json"), DataFormat::Json)?;
    let resources = Resources::load_dir(root.join("resources"), HitConfig::default())?;
    let fx = FeatureExtractor::new(Arc::new(resources), ExtractionConfig::default())?;

    for half in &data.halves {
        println!("{}: {}", half.id, half.sentence);
        let shape = classify_sentence(&half.sentence)?;
        println!("  type {}, pattern {:?}", shape.sentence_type.as_str(), shape.pattern);
        for t in extract_triples(&half.sentence, None)?.iter().filter(|t| t.is_relation()) {
            let word = |x: &Option<_>| x.as_ref().map_or("-".to_string(), |t: &schema_hardness::text::Token| t.lower());
            println!("  triple ({}, {}, {})", word(&t.subject), t.verb.lower(), word(&t.object));
        }
        if let Some(qs) = fx.analyze(half).as_ref().and_then(build_queries) {
            println!("  queries {:?}", qs.phrases());
        }
        let v = fx.extract(half);
        let show = [Feature::SL, Feature::NCH, Feature::RP1i1, Feature::RP1i2, Feature::CN, Feature::SEM];
        let ints: Vec<String> = show.iter().map(|&f| format!("{}={}", f.name(), v.int(f))).collect();
        println!("  {}  RP2i1={} TBSPOL={}", ints.join(" "), v.cat(Feature::RP2i1), v.cat(Feature::TBSPOL));
    }
    Ok(())
}
