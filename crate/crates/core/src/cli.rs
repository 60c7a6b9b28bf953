//! The `hardness` command line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | usage error (unknown flag or subcommand, missing argument) |
//! | 3 | configuration error |
//! | 4 | dataset error |
//! | 5 | text processing error |
//! | 6 | resource error |
//! | 7 | feature error |
//! | 8 | forest error |
//! | 9 | LSTM error |
//! | 10 | evaluation error |
//! | 11 | file I/O error |

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::CliConfig;
use crate::eval::{self, EvaluationReport, HardnessPredictor, TimingReport};
use crate::features::{self, Feature, FeatureExtractor, FeatureSchema, FeatureVector};
use crate::forest::{self, FeaturePredictor, ForestModel, LabeledMatrix, MODEL_MAGIC};
use crate::lstm::{LstmModel, LSTM_MAGIC};
use crate::resources::{CorpusIndex, HitCountProvider, Resources, RuleExtractor};
use crate::schema::{self, DataFormat, Dataset};
use crate::{synthetic, Error};

#[derive(Debug, Parser)]
#[command(name = "hardness", version, about = "Estimate how hard Winograd schema halves are for people")]
pub struct Cli {
    /// key = value configuration file; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// resource directory (corpus, lexicons, chains, hit cache)
    #[arg(long, global = true)]
    pub resources: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// allow live hit-count lookups
    #[arg(long, global = true)]
    pub network: bool,
    #[arg(long, global = true)]
    pub hit_endpoint: Option<String>,
    /// relative hit-count difference for a query decision
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a corpus index from one-sentence-per-line text files
    IngestCorpus {
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract the feature vectors of every half
    Extract {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// defaults to the extension of --out
        #[arg(long, value_enum)]
        format: Option<DumpFormat>,
    },
    /// Train the random forest
    TrainRf {
        /// precomputed feature dump; extracted from --labels when absent
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        n_trees: Option<usize>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        min_samples_leaf: Option<usize>,
    },
    /// Train the LSTM regressor
    TrainLstm {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// per-epoch CSV (epoch, train_mae, val_mae)
        #[arg(long)]
        history: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch_size: Option<usize>,
    },
    /// Predict the hardness of every half
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// CSV of id,hardness; standard output when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a model against labelled halves
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// file with one half id per line
        #[arg(long)]
        subset: Option<PathBuf>,
        #[arg(long)]
        subset_tag: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Retrain without each feature component and report the metrics
    Importance {
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        labels: PathBuf,
        /// test half ids; otherwise a seeded random split
        #[arg(long)]
        test_ids: Option<PathBuf>,
        #[arg(long, default_value_t = 0.35)]
        test_fraction: f64,
        #[arg(long)]
        n_trees: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time feature extraction and model inference per half
    Bench {
        #[arg(long)]
        data: PathBuf,
        /// model to time (forest or LSTM); extraction only when absent
        #[arg(long)]
        model: Vec<PathBuf>,
        #[arg(long, default_value_t = 5)]
        warmup: usize,
        /// fill cache misses with simulated hit counts (in memory only)
        #[arg(long)]
        simulate_hits: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

macro_rules! via_lib {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Lib(Error::from(e))
            }
        }
    )*};
}

via_lib!(
    crate::schema::DatasetError,
    crate::text::TextError,
    crate::resources::ResourceError,
    crate::features::FeatureError,
    crate::forest::ForestError,
    crate::lstm::LstmError,
    crate::eval::EvalError,
    crate::config::ConfigError
);

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) => match e {
                Error::Config(_) => 3,
                Error::Dataset(_) => 4,
                Error::Text(_) => 5,
                Error::Resource(_) => 6,
                Error::Feature(_) => 7,
                Error::Forest(_) => 8,
                Error::Lstm(_) => 9,
                Error::Eval(_) => 10,
                Error::Io { .. } => 11,
            },
        }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Lib(Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, content: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| io_err(path, e))
}

fn load_data(path: &Path) -> Result<Dataset, CliError> {
    Ok(schema::load_dataset(path, DataFormat::from_path(path)?)?)
}

fn load_feature_dump(path: &Path) -> Result<Vec<FeatureVector>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    Ok(if is_json { features::parse_json(&text)? } else { features::parse_csv(&text)? })
}

/// Resolves the configuration: defaults, config file, environment, flags.
pub fn resolve_config(cli: &Cli, env: impl Fn(&str) -> Option<String>) -> Result<CliConfig, CliError> {
    let mut cfg = CliConfig::default();
    if let Some(path) = &cli.config {
        cfg.merge_file(path)?;
    }
    cfg.merge_env(env)?;
    if let Some(r) = &cli.resources {
        cfg.resources = Some(r.clone());
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.network {
        cfg.network = true;
    }
    if let Some(e) = &cli.hit_endpoint {
        cfg.hit_endpoint = Some(e.clone());
    }
    if let Some(t) = cli.threshold {
        cfg.threshold = t;
    }
    match &cli.command {
        Command::TrainRf {
            n_trees,
            max_depth,
            min_samples_leaf,
            ..
        } => {
            cfg.n_trees = n_trees.unwrap_or(cfg.n_trees);
            cfg.max_depth = max_depth.or(cfg.max_depth);
            cfg.min_samples_leaf = min_samples_leaf.unwrap_or(cfg.min_samples_leaf);
        }
        Command::Importance { n_trees, .. } => cfg.n_trees = n_trees.unwrap_or(cfg.n_trees),
        Command::TrainLstm { epochs, batch_size, .. } => {
            cfg.epochs = epochs.unwrap_or(cfg.epochs);
            cfg.batch_size = batch_size.unwrap_or(cfg.batch_size);
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn extractor(cfg: &CliConfig, in_memory_hits: bool) -> Result<FeatureExtractor, CliError> {
    let mut r = match &cfg.resources {
        Some(dir) => Resources::load_dir(dir, cfg.hit_config())?,
        None => Resources::empty(),
    };
    if in_memory_hits {
        r.hits = HitCountProvider::in_memory(r.hits.snapshot(), r.hits.config().clone());
    }
    Ok(FeatureExtractor::new(Arc::new(r), cfg.extraction_config())?)
}

/// Feature vectors for the halves of `labels`, read from `dump` when given.
fn vectors_for(cfg: &CliConfig, dump: Option<&Path>, labels: &Dataset) -> Result<Vec<FeatureVector>, CliError> {
    match dump {
        Some(p) => load_feature_dump(p),
        None => Ok(extractor(cfg, false)?.extract_batch(&labels.halves)),
    }
}

/// Rows of `vectors` whose half is labelled in `labels`, in `labels` order.
fn matrix(vectors: &[FeatureVector], labels: &Dataset, schema: &FeatureSchema) -> Result<LabeledMatrix, CliError> {
    let by_id: HashMap<&str, &FeatureVector> = vectors.iter().map(|v| (v.id.as_str(), v)).collect();
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    for h in &labels.halves {
        let (Some(v), Some(y)) = (by_id.get(h.id.as_str()), h.hardness) else {
            continue;
        };
        rows.push(schema.encode_numeric(v));
        targets.push(y);
    }
    if rows.is_empty() {
        return Err(CliError::Lib(Error::Eval(eval::EvalError::Empty)));
    }
    let columns = Feature::ALL.iter().map(|f| f.name().to_string()).collect();
    Ok(LabeledMatrix::new(columns, rows, targets)?)
}

fn labelled_vectors<'a>(vectors: &'a [FeatureVector], d: &Dataset) -> Vec<&'a FeatureVector> {
    let ids: std::collections::HashSet<&str> = d.halves.iter().filter(|h| h.hardness.is_some()).map(|h| h.id.as_str()).collect();
    vectors.iter().filter(|v| ids.contains(v.id.as_str())).collect()
}

pub enum LoadedModel {
    Forest(ForestModel),
    Lstm(LstmModel),
}

pub fn load_model(path: &Path) -> Result<LoadedModel, CliError> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.starts_with(LSTM_MAGIC) {
        Ok(LoadedModel::Lstm(LstmModel::from_bytes(&bytes)?))
    } else if bytes.starts_with(MODEL_MAGIC.as_bytes()) {
        Ok(LoadedModel::Forest(ForestModel::from_bytes(&bytes)?))
    } else {
        Err(forest::ForestError::Format(format!("{} is neither a forest nor an LSTM model", path.display())).into())
    }
}

fn predictor<'a>(m: &'a LoadedModel, fx: &'a FeatureExtractor) -> Box<dyn HardnessPredictor + 'a> {
    match m {
        LoadedModel::Forest(model) => Box::new(FeaturePredictor { model, extractor: fx }),
        LoadedModel::Lstm(model) => Box::new(model.clone()),
    }
}

#[derive(Serialize)]
struct ImportanceOutput {
    reference: EvaluationReport,
    rows: Vec<forest::AblationRow>,
}

fn fmt_corr(c: Option<f64>) -> String {
    c.map_or("undefined".to_string(), |v| format!("{v:.4}"))
}

/// Runs one parsed command.
pub fn execute(cli: &Cli, cfg: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let say = |out: &mut dyn Write, s: String| out.write_all(s.as_bytes()).map_err(|e| io_err(Path::new("<stdout>"), e));
    match &cli.command {
        Command::IngestCorpus { input, out: dest } => {
            let mut index = CorpusIndex::new();
            for p in input {
                let f = fs::File::open(p).map_err(|e| io_err(p, e))?;
                index.merge(CorpusIndex::build(BufReader::new(f), &RuleExtractor)?);
            }
            let f = fs::File::create(dest).map_err(|e| io_err(dest, e))?;
            index.write_json(std::io::BufWriter::new(f))?;
            say(out, format!("indexed {} sentences -> {}\n", index.doc_count(), dest.display()))
        }
        Command::Extract { data, out: dest, format } => {
            let d = load_data(data)?;
            let fx = extractor(cfg, false)?;
            let vectors = fx.extract_batch(&d.halves);
            let json = format.map_or_else(
                || dest.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")),
                |f| f == DumpFormat::Json,
            );
            write_file(dest, if json { features::to_json(&vectors) } else { features::to_csv(&vectors) })?;
            let covered = vectors.iter().filter(|v| v.coverage.0.iter().all(|&c| c)).count();
            say(
                out,
                format!("extracted {} halves ({covered} fully covered) -> {}\n", vectors.len(), dest.display()),
            )
        }
        Command::TrainRf {
            features: dump,
            labels,
            out: dest,
            ..
        } => {
            let d = load_data(labels)?;
            let vectors = vectors_for(cfg, dump.as_deref(), &d)?;
            let schema = FeatureSchema::build(labelled_vectors(&vectors, &d));
            let m = matrix(&vectors, &d, &schema)?;
            let hp = cfg.forest_hyperparams();
            let model = forest::fit_forest(&m.rows, &m.targets, &hp)?.with_columns(m.columns.clone())?.with_schema(schema);
            model.save(dest)?;
            say(
                out,
                format!(
                    "trained {} trees on {} halves x {} features -> {}\n",
                    hp.n_trees,
                    m.rows.len(),
                    m.columns.len(),
                    dest.display()
                ),
            )
        }
        Command::TrainLstm {
            data, out: dest, history, ..
        } => {
            let d = load_data(data)?;
            let (model, h) = LstmModel::fit_halves(&d.halves, &cfg.train_config())?;
            model.save(dest)?;
            if let Some(p) = history {
                write_file(p, h.to_csv())?;
            }
            let last = h.epochs.last();
            say(
                out,
                format!(
                    "trained on {} / validated on {} halves, vocabulary {}; final train MAE {:.4}, validation MAE {} -> {}\n",
                    h.n_train,
                    h.n_val,
                    model.vocab.len(),
                    last.map_or(f64::NAN, |e| e.train_mae),
                    last.and_then(|e| e.val_mae).map_or("-".to_string(), |v| format!("{v:.4}")),
                    dest.display()
                ),
            )
        }
        Command::Predict { model, data, out: dest } => {
            let d = load_data(data)?;
            let m = load_model(model)?;
            let fx = extractor(cfg, false)?;
            let p = predictor(&m, &fx);
            let mut csv = String::from("id,hardness\n");
            for h in &d.halves {
                csv.push_str(&format!("{},{}\n", h.id, p.predict_half(h)?.clamp(0.0, 1.0)));
            }
            match dest {
                Some(path) => {
                    write_file(path, csv)?;
                    say(out, format!("predicted {} halves -> {}\n", d.len(), path.display()))
                }
                None => say(out, csv),
            }
        }
        Command::Evaluate {
            model,
            data,
            subset,
            subset_tag,
            out: dest,
        } => {
            let d = load_data(data)?;
            let m = load_model(model)?;
            let fx = extractor(cfg, false)?;
            let p = predictor(&m, &fx);
            let mut rows = vec![(p.name(), eval::evaluate(p.as_ref(), &d, None, None)?)];
            if let Some(path) = subset {
                let ids = schema::read_id_list(path)?;
                let tag = subset_tag.clone().unwrap_or_else(|| "subset".to_string());
                rows.push((p.name(), eval::evaluate(p.as_ref(), &d, Some(&ids), Some(&tag))?));
            }
            if let Some(path) = dest {
                let reports: Vec<&EvaluationReport> = rows.iter().map(|r| &r.1).collect();
                write_file(path, serde_json::to_string_pretty(&reports).expect("reports serialize"))?;
            }
            say(out, eval::render_table(&rows))
        }
        Command::Importance {
            features: dump,
            labels,
            test_ids,
            test_fraction,
            out: dest,
            ..
        } => {
            let d = load_data(labels)?;
            let (train, test) = match test_ids {
                Some(p) => schema::split_by_ids(&d, &schema::read_id_list(p)?)?,
                None => schema::split_train_test(&d, *test_fraction, cfg.seed)?,
            };
            let vectors = vectors_for(cfg, dump.as_deref(), &d)?;
            let schema = FeatureSchema::build(labelled_vectors(&vectors, &train));
            let (tr, te) = (matrix(&vectors, &train, &schema)?, matrix(&vectors, &test, &schema)?);
            let hp = cfg.forest_hyperparams();
            let reference = tr.fit_and_evaluate(&te, &hp)?;
            let rows = forest::importance_by_ablation(&tr, &te, &hp, &forest::component_groups())?;
            let mut table = format!("{:<26}  {:>9}  {:>11}\n", "without component", "accuracy", "correlation");
            for r in &rows {
                table.push_str(&format!("{:<26}  {:>9.2}  {:>11}\n", r.component, r.accuracy, fmt_corr(r.correlation)));
            }
            if let Some(path) = dest {
                let doc = ImportanceOutput { reference: reference.clone(), rows };
                write_file(path, serde_json::to_string_pretty(&doc).expect("importance serializes"))?;
            }
            say(
                out,
                format!(
                    "{table}(all features: accuracy {:.2}, correlation {})\n",
                    reference.accuracy,
                    fmt_corr(reference.pearson)
                ),
            )
        }
        Command::Bench {
            data,
            model,
            warmup,
            simulate_hits,
            out: dest,
        } => {
            let d = load_data(data)?;
            let fx = extractor(cfg, true)?;
            if *simulate_hits {
                synthetic::warm_hit_cache(&fx, &d.halves)?;
            }
            let mut reports: Vec<TimingReport> = Vec::new();
            reports.push(eval::benchmark_with("feature extraction", &d.halves, *warmup, |h| {
                std::hint::black_box(fx.extract(h));
                Ok(())
            })?);
            let models = model.iter().map(|p| load_model(p)).collect::<Result<Vec<_>, _>>()?;
            for m in &models {
                let p = predictor(m, &fx);
                reports.push(eval::benchmark_latency(p.as_ref(), &d.halves, *warmup)?);
            }
            let mut text = String::new();
            for r in &reports {
                text.push_str(&format!(
                    "{:<20} n={:<4} mean {:>10.3} ms  p95 {:>10.3} ms  max {:>10.3} ms\n",
                    r.label, r.n, r.mean_ms, r.p95_ms, r.max_ms
                ));
            }
            if let Some(path) = dest {
                write_file(path, serde_json::to_string_pretty(&reports).expect("timings serialize"))?;
            }
            say(out, text)
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Summaries go to `out`, diagnostics to `err`.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = out.write_all(text.as_bytes());
                0
            } else {
                let _ = err.write_all(text.as_bytes());
                2
            };
        }
    };
    let result = resolve_config(&cli, |k| std::env::var(k).ok()).and_then(|cfg| execute(&cli, &cfg, out));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
