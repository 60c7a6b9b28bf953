//! Times feature extraction and both regressors per half.
//!
//!     cargo run --release --example latency

use std::sync::Arc;

use schema_hardness::eval::{benchmark_latency, benchmark_with, TimingReport};
use schema_hardness::features::{ExtractionConfig, FeatureExtractor, FeatureSchema};
use schema_hardness::forest::{fit_forest, FeaturePredictor, ForestHyperparams};
use schema_hardness::lstm::{LstmModel, TrainConfig};
use schema_hardness::resources::Resources;
use schema_hardness::synthetic::{synthetic_dataset, warm_hit_cache};

fn show(r: &TimingReport) {
    println!("{:<20} mean {:>8.3} ms  p95 {:>8.3} ms  max {:>8.3} ms", r.label, r.mean_ms, r.p95_ms, r.max_ms);
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = synthetic_dataset(200, 7, "lat");
    let fx = FeatureExtractor::new(Arc::new(Resources::empty()), ExtractionConfig::default())?;
    warm_hit_cache(&fx, &data.halves)?;
    show(&benchmark_with("feature extraction", &data.halves, 5, |h| {
        std::hint::black_box(fx.extract(h));
        Ok(())
    })?);

    let vectors = fx.extract_batch(&data.halves);
    let schema = FeatureSchema::build(&vectors);
    let x: Vec<Vec<f64>> = vectors.iter().map(|v| schema.encode_numeric(v)).collect();
    let y: Vec<f64> = data.halves.iter().map(|h| h.hardness.unwrap_or(0.0)).collect();
    let forest = fit_forest(&x, &y, &ForestHyperparams::default())?.with_schema(schema);
    show(&benchmark_latency(&FeaturePredictor { model: &forest, extractor: &fx }, &data.halves, 5)?);

    let (lstm, _) = LstmModel::fit_halves(&data.halves, &TrainConfig { epochs: 2, ..Default::default() })?;
    show(&benchmark_latency(&lstm, &data.halves, 5)?);
    Ok(())
}
