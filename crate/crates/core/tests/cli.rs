use std::fs;
use std::path::{Path, PathBuf};

use schema_hardness::cli::run_cli;
use schema_hardness::schema::{save_dataset, split_train_test, DataFormat};
use schema_hardness::synthetic::synthetic_dataset;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(std::iter::once("hardness").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn resources() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/resources")
}

/// (train, test) synthetic datasets written as JSON.
fn data(dir: &Path) -> (PathBuf, PathBuf) {
    let d = synthetic_dataset(80, 21, "c");
    let (train, test) = split_train_test(&d, 0.25, 21).unwrap();
    let (a, b) = (dir.join("train.json"), dir.join("test.json"));
    save_dataset(&train, &a, DataFormat::Json).unwrap();
    save_dataset(&test, &b, DataFormat::Json).unwrap();
    (a, b)
}

#[test]
fn extract_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _) = data(dir.path());
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let (code, stdout, err) = run(&["extract", "--data", s(&train), "--out", s(out)]);
        assert_eq!(code, 0, "{err}");
        assert!(stdout.starts_with("extracted 60 halves"), "{stdout}");
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.lines().next().unwrap().contains("SP"));
    assert_eq!(text.lines().filter(|l| l.starts_with("c-")).count(), 60);
}

#[test]
fn train_rf_is_reproducible_and_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = data(dir.path());
    let (m1, m2) = (dir.path().join("m1.rf"), dir.path().join("m2.rf"));
    for m in [&m1, &m2] {
        let (code, _, err) = run(&["train-rf", "--labels", s(&train), "--out", s(m), "--n-trees", "15", "--seed", "4"]);
        assert_eq!(code, 0, "{err}");
    }
    assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());

    let subset = dir.path().join("subset.txt");
    fs::write(&subset, "# first few\nc-0\nc-1\nc-2\nc-3\nc-4\nc-5\nc-6\nc-7\n").unwrap();
    let report = dir.path().join("report.json");
    let (code, stdout, err) = run(&[
        "evaluate",
        "--model",
        s(&m1),
        "--data",
        s(&test),
        "--subset",
        s(&subset),
        "--subset-tag",
        "head",
        "--out",
        s(&report),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("Accuracy") && stdout.contains("[head]"), "{stdout}");
    let reports: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let rows = reports.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["n"], 20);
    let (acc, mae) = (rows[0]["accuracy"].as_f64().unwrap(), rows[0]["mae_unit"].as_f64().unwrap());
    assert!((acc + 100.0 * mae - 100.0).abs() < 1e-12);

    let (code, stdout, err) = run(&["predict", "--model", s(&m1), "--data", s(&test)]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "id,hardness");
    assert_eq!(lines.len(), 21);
    for l in &lines[1..] {
        let y: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&y));
    }
}

#[test]
fn lstm_round_trip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = data(dir.path());
    let (model, hist) = (dir.path().join("m.lstm"), dir.path().join("h.csv"));
    let (code, stdout, err) =
        run(&["train-lstm", "--data", s(&train), "--out", s(&model), "--history", s(&hist), "--epochs", "2"]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("trained on 42 / validated on 18"), "{stdout}");
    assert_eq!(fs::read_to_string(&hist).unwrap().lines().count(), 3);
    let (code, a, _) = run(&["predict", "--model", s(&model), "--data", s(&test)]);
    assert_eq!(code, 0);
    let (_, b, _) = run(&["predict", "--model", s(&model), "--data", s(&test)]);
    assert_eq!(a, b);
}

#[test]
fn ingest_corpus_writes_an_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("index.json");
    let corpus = resources().join("corpus.txt");
    let (code, stdout, err) = run(&["ingest-corpus", "--input", s(&corpus), "--out", s(&out)]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.starts_with("indexed "), "{stdout}");
    let f = fs::File::open(&out).unwrap();
    let index = schema_hardness::resources::CorpusIndex::read_json(f).unwrap();
    assert!(index.doc_count() > 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["extract", "--data"]).0, 2);

    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "no_such_key = 1\n").unwrap();
    let (code, _, err) = run(&["--config", s(&bad), "extract", "--data", "x.json", "--out", "y.csv"]);
    assert_eq!(code, 3, "{err}");
    let (code, _, _) = run(&["--resources", "/definitely/missing", "extract", "--data", "x.json", "--out", "y.csv"]);
    assert_eq!(code, 3);

    let missing = dir.path().join("missing.json");
    let out = dir.path().join("o.csv");
    let (code, _, err) = run(&["extract", "--data", s(&missing), "--out", s(&out)]);
    assert_eq!(code, 4, "{err}");
    assert!(err.starts_with("error: "));

    let (train, _) = data(dir.path());
    let not_a_model = dir.path().join("junk.bin");
    fs::write(&not_a_model, b"junk").unwrap();
    let (code, _, _) = run(&["predict", "--model", s(&not_a_model), "--data", s(&train)]);
    assert_ne!(code, 0);
}

#[test]
fn config_file_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let (train, _) = data(dir.path());
    let conf = dir.path().join("run.conf");
    fs::write(&conf, format!("resources = {}\nn_trees = 3\nseed = 1\n", resources().display())).unwrap();
    let (a, b) = (dir.path().join("a.rf"), dir.path().join("b.rf"));
    let (code, stdout, err) = run(&["--config", s(&conf), "train-rf", "--labels", s(&train), "--out", s(&a)]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.starts_with("trained 3 trees"), "{stdout}");
    let (code, _, _) = run(&["--config", s(&conf), "--seed", "2", "train-rf", "--labels", s(&train), "--out", s(&b)]);
    assert_eq!(code, 0);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
