//! Balances a small labelled set against a larger one by replication.
//!
//!     cargo run --example oversampling

use std::collections::BTreeSet;

use schema_hardness::schema::{oversample_balance, replication_factor};
use schema_hardness::synthetic::synthetic_dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let original = synthetic_dataset(286, 4, "wsc");
    let large = synthetic_dataset(943, 5, "dpr");
    let held_out: BTreeSet<String> = original.halves[..100].iter().map(|h| h.id.clone()).collect();
    println!("replication factor k = {}", replication_factor(943, 186));
    let balanced = oversample_balance(&original, &large, &held_out, Some(1872))?;
    let replicas = balanced.halves.iter().filter(|h| h.id.contains('#')).count();
    println!("{} halves, {replicas} of them replicas", balanced.len());
    Ok(())
}
