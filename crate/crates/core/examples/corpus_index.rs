//! Builds a role/connective index from a plain-text corpus (one sentence
//! per line) and queries it.
//!
//!     cargo run --example corpus_index -- [corpus.txt]

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use schema_hardness::resources::{CorpusIndex, Role, RuleExtractor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/resources/corpus.txt"));
    let index = CorpusIndex::build(BufReader::new(File::open(&path)?), &RuleExtractor)?;
    println!("{} sentences indexed from {}", index.doc_count(), path.display());
    for lemma in ["cat", "mouse", "councilman", "demonstrator"] {
        println!(
            "{lemma:>14}: subject {:>4}  object {:>4}",
            index.role_frequency(lemma, Role::Subject),
            index.role_frequency(lemma, Role::Object)
        );
    }
    println!("catch / because / clever: {}", index.connective_triple_frequency("catch", "because", "clever"));
    Ok(())
}
