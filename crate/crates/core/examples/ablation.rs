//! Drops each feature component in turn and reports the change in
//! accuracy and correlation.
//!
//!     cargo run --release --example ablation

use std::sync::Arc;

use schema_hardness::features::{ExtractionConfig, Feature, FeatureExtractor, FeatureSchema};
use schema_hardness::forest::{component_groups, importance_by_ablation, ForestHyperparams, LabeledMatrix};
use schema_hardness::resources::Resources;
use schema_hardness::schema::{split_train_test, Dataset};
use schema_hardness::synthetic::{synthetic_dataset, warm_hit_cache};

fn matrix(fx: &FeatureExtractor, schema: &FeatureSchema, d: &Dataset) -> LabeledMatrix {
    let rows = fx.extract_batch(&d.halves).iter().map(|v| schema.encode_numeric(v)).collect();
    let columns = Feature::ALL.iter().map(|f| f.name().to_string()).collect();
    LabeledMatrix::new(columns, rows, d.halves.iter().map(|h| h.hardness.unwrap_or(0.0)).collect()).expect("matrix")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = synthetic_dataset(286, 3, "abl");
    let (train, test) = split_train_test(&data, 0.35, 3)?;
    let fx = FeatureExtractor::new(Arc::new(Resources::empty()), ExtractionConfig::default())?;
    warm_hit_cache(&fx, &data.halves)?;
    let schema = FeatureSchema::build(&fx.extract_batch(&train.halves));
    let (tr, te) = (matrix(&fx, &schema, &train), matrix(&fx, &schema, &test));
    let hp = ForestHyperparams { n_trees: 50, ..Default::default() };
    let all = tr.fit_and_evaluate(&te, &hp)?;
    println!("all features: accuracy {:.2}, correlation {:?}", all.accuracy, all.pearson);
    for row in importance_by_ablation(&tr, &te, &hp, &component_groups())? {
        println!("without {:<24} accuracy {:>6.2}  correlation {:?}", row.component, row.accuracy, row.correlation);
    }
    Ok(())
}
