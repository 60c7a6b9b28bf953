//! Worked examples against the bundled fixture resources.

use std::path::PathBuf;
use std::sync::Arc;

use schema_hardness::features::{build_queries, Component, ExtractionConfig, Feature, FeatureExtractor, FeatureVector};
use schema_hardness::resources::{HitConfig, Resources};
use schema_hardness::schema::{load_dataset, DataFormat, Dataset};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn setup() -> (Dataset, FeatureExtractor) {
    let d = load_dataset(fixture("data/worked.json"), DataFormat::Json).unwrap();
    let r = Resources::load_dir(fixture("resources"), HitConfig::default()).unwrap();
    let fx = FeatureExtractor::new(Arc::new(r), ExtractionConfig::default()).unwrap();
    (d, fx)
}

fn features(id: &str) -> FeatureVector {
    let (d, fx) = setup();
    fx.extract(d.get(id).unwrap())
}

fn ints(v: &FeatureVector, fs: &[Feature]) -> Vec<i64> {
    fs.iter().map(|&f| v.int(f)).collect()
}

#[test]
fn catch_queries_verbatim() {
    let (d, fx) = setup();
    let a = fx.analyze(d.get("catch-1").unwrap()).unwrap();
    let qs = build_queries(&a).unwrap();
    assert_eq!(
        qs.phrases(),
        ["cat was", "mouse was", "cat was clever", "mouse was clever", "clever cat", "clever mouse"]
    );
}

#[test]
fn councilmen_queries() {
    let (d, fx) = setup();
    let a = fx.analyze(d.get("councilmen-1").unwrap()).unwrap();
    let qs = build_queries(&a).unwrap();
    assert_eq!(qs.qr1, "councilmen feared");
    assert_eq!(qs.qr2, "demonstrators feared");
    assert_eq!(qs.qr3.as_deref(), Some("councilmen feared violence"));
    assert_eq!(qs.qr5, None);
}

#[test]
fn catch_feature_vector() {
    use Feature::*;
    let v = features("catch-1");
    assert_eq!(v.cat(ST), "complex");
    assert_eq!(v.cat(SP), "SV because SV");
    assert_eq!(ints(&v, &[STN, QTN, SL]), [0, 0, 9]);
    assert_eq!(ints(&v, &[WN, WP, HN, VF, JF]), [6, 9, 1, 1, 0]);
    // hits: 1000/500, 300/100, 120/200
    assert_eq!(ints(&v, &[GL1i1, GL1i2, GL2i1, GL2i2, GL3i1, GL3i2, GL4i1, GL4i2]), [1, 0, 1, 0, 0, 1, 1, 0]);
    assert_eq!(ints(&v, &[GLF1i1, GLF1i2, GLF4i1, GLF4i2]), [0, 0, 0, 0]);
    assert_eq!(ints(&v, &[CN, CNF]), [1, -1]);
    // corpus: catch-because-clever seen 150 times; adjective rule picks the subject
    assert_eq!(v.int(CNT), 1);
    // mouse is mostly an object in the corpus; the pronoun is a subject; cat has no object uses
    assert_eq!(v.int(SEM), 1);
    assert_eq!(v.cat(TBSPOL), "neutral");
    assert_eq!(v.cat(TBQPOL), "positive");
    assert!(v.coverage.get(Component::SearchQueries));
}

#[test]
fn councilmen_second_half_feature_vector() {
    use Feature::*;
    let v = features("councilmen-2");
    assert_eq!(v.cat(SP), "SV because SV");
    assert_eq!(ints(&v, &[STN, QTN, SL, SEM]), [0, 0, 12, 1]);
    assert_eq!(ints(&v, &[WN, WP, HN, VF, JF]), [8, 15, 1, 2, 0]);
    assert_eq!(ints(&v, &[GL1i1, GL1i2, GL2i1, GL2i2, GL3i1, GL3i2, GL4i1, GL4i2]), [0, 1, 0, 1, 0, 0, 0, 1]);
    assert_eq!(ints(&v, &[CN, CNF, CNT, NCH]), [2, -1, 1, 2]);
    assert_eq!(ints(&v, &[RP1i1, RP1i2, RPTL]), [0, 1, 2]);
    assert_eq!(v.cat(RP2i1), "negative-positive");
    assert_eq!(v.cat(RP2i2), "positive-positive");
    assert_eq!(v.cat(RP3i1), "negative-positive");
    assert_eq!(ints(&v, &[OP1i1, OP1i2, OPTL]), [0, 1, 2]);
    assert_eq!(v.cat(OP2i1), "negative-positive");
    assert_eq!(v.cat(TBSPOL), "negative");
    assert_eq!(v.cat(TBQPOL), "positive");
    assert!(Component::ALL.iter().all(|c| v.coverage.get(*c)));
}

#[test]
fn councilmen_first_half_chain_and_connective() {
    use Feature::*;
    let v = features("councilmen-1");
    // refuse-s fear-s chain: the protagonist is the subject of refuse
    assert_eq!(v.int(NCH), 1);
    assert_eq!(v.int(CNT), 1);
    assert_eq!(ints(&v, &[CN]), [1]);
    // fear is negative: the subject of refuse (negative) matches
    assert_eq!(ints(&v, &[RP1i1, RP1i2, RPTL]), [1, 0, 1]);
}

#[test]
fn proper_names_use_frame_roles() {
    use Feature::*;
    let v = features("catch-names");
    // no cached hits for the names themselves
    assert_eq!(ints(&v, &[GL1i1, GL1i2, GL4i1, GL4i2]), [0, 0, 0, 0]);
    // captor/captive: 40/60, 5/2, 7/7
    assert_eq!(
        ints(&v, &[GLF1i1, GLF1i2, GLF2i1, GLF2i2, GLF3i1, GLF3i2, GLF4i1, GLF4i2]),
        [0, 1, 1, 0, 0, 0, 0, 0]
    );
    assert_eq!(v.cat(ST), "complex");
    assert_eq!(v.cat(SP), "SV although SV");
    assert!(v.cat(RP3i1).ends_with("-although"));
    assert_eq!(v.cat(RP3i1), format!("{}-although", v.cat(RP2i1)));
}

#[test]
fn offline_empty_cache_zeroes_search_block() {
    let d = load_dataset(fixture("data/worked.json"), DataFormat::Json).unwrap();
    let fx = FeatureExtractor::new(Arc::new(Resources::empty()), ExtractionConfig::default()).unwrap();
    let v = fx.extract(d.get("catch-1").unwrap());
    for f in Component::SearchQueries.features() {
        assert_eq!(v.int(f), 0, "{f}");
    }
    assert!(!v.coverage.get(Component::SearchQueries));
    assert_eq!(v.int(Feature::SEM), -1);
    assert_eq!(v.int(Feature::NCH), -1);
}

#[test]
fn no_connective_zeroes_word_relations() {
    use Feature::*;
    let (_, fx) = setup();
    let h = schema_hardness::SchemaHalf::new("x", "The cat chased the mouse.", "Who chased the mouse?", "the cat", "the mouse");
    let v = fx.extract(&h);
    assert_eq!(ints(&v, &[WN, WP, HN, VF, JF]), [0, 0, 0, 0, 0]);
    assert!(!v.coverage.get(Component::WordRelations));
    assert_eq!(v.cat(ST), "simple");
}
