//! Trains a random forest on synthetic halves, evaluates it on a held-out
//! split and round-trips the model through a file.
//!
//!     cargo run --release --example forest_regression

use std::sync::Arc;

use schema_hardness::eval::{evaluate, render_table};
use schema_hardness::features::{ExtractionConfig, FeatureExtractor, FeatureSchema};
use schema_hardness::forest::{fit_forest, FeaturePredictor, ForestHyperparams, ForestModel};
use schema_hardness::resources::Resources;
use schema_hardness::schema::split_train_test;
use schema_hardness::synthetic::synthetic_dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = synthetic_dataset(286, 1, "demo");
    let (train, test) = split_train_test(&data, 100.0 / 286.0, 1)?;
    let fx = FeatureExtractor::new(Arc::new(Resources::empty()), ExtractionConfig::default())?;

    let vectors = fx.extract_batch(&train.halves);
    let schema = FeatureSchema::build(&vectors);
    let x: Vec<Vec<f64>> = vectors.iter().map(|v| schema.encode_numeric(v)).collect();
    let y: Vec<f64> = train.halves.iter().map(|h| h.hardness.unwrap_or(0.0)).collect();
    let model = fit_forest(&x, &y, &ForestHyperparams::default())?.with_schema(schema);

    let path = std::env::temp_dir().join("schema-hardness-demo.rf");
    model.save(&path)?;
    let model = ForestModel::load(&path)?;
    println!("{} trees, saved to {}", model.trees().len(), path.display());

    let predictor = FeaturePredictor { model: &model, extractor: &fx };
    let report = evaluate(&predictor, &test, None, None)?;
    print!("{}", render_table(&[("random forest".to_string(), report)]));
    Ok(())
}
