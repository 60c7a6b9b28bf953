//! Metrics, evaluation reports and latency benchmarks.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::schema::{Dataset, SchemaHalf};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("length mismatch: {0} predictions vs {1} labels")]
    LengthMismatch(usize, usize),
    #[error("nothing to evaluate")]
    Empty,
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("half {0} has no hardness label")]
    Unlabeled(String),
    #[error("subset ids select no half of the dataset")]
    EmptySubset,
    #[error("warmup {warmup} leaves nothing to time in {n} halves")]
    Warmup { warmup: usize, n: usize },
    #[error("prediction failed for {id}: {message}")]
    Predict { id: String, message: String },
}

fn check(pred: &[f64], label: &[f64]) -> Result<(), EvalError> {
    if pred.len() != label.len() {
        return Err(EvalError::LengthMismatch(pred.len(), label.len()));
    }
    if pred.is_empty() {
        return Err(EvalError::Empty);
    }
    if let Some(i) = pred.iter().chain(label).position(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite(i % pred.len()));
    }
    Ok(())
}

/// Mean absolute error on the 0–1 scale.
pub fn mean_absolute_error(pred: &[f64], label: &[f64]) -> Result<f64, EvalError> {
    check(pred, label)?;
    Ok(pred.iter().zip(label).map(|(p, y)| (p - y).abs()).sum::<f64>() / pred.len() as f64)
}

/// 100 minus the MAE in percent.
pub fn accuracy_score(pred: &[f64], label: &[f64]) -> Result<f64, EvalError> {
    Ok(100.0 - 100.0 * mean_absolute_error(pred, label)?)
}

/// Sample Pearson correlation; `None` when either series has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>, EvalError> {
    check(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub mae_unit: f64,
    pub mae_percent: f64,
    pub accuracy: f64,
    /// `None` when predictions or labels are constant
    pub pearson: Option<f64>,
    pub n: usize,
    pub subset_tag: Option<String>,
}

impl EvaluationReport {
    pub fn from_predictions(pred: &[f64], label: &[f64], subset_tag: Option<String>) -> Result<Self, EvalError> {
        let mae_unit = mean_absolute_error(pred, label)?;
        let mae_percent = 100.0 * mae_unit;
        Ok(Self {
            mae_unit,
            mae_percent,
            accuracy: 100.0 - mae_percent,
            pearson: pearson(pred, label)?,
            n: pred.len(),
            subset_tag,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Anything that maps a schema half to a hardness estimate.
pub trait HardnessPredictor: Sync {
    fn name(&self) -> String;
    fn predict_half(&self, half: &SchemaHalf) -> Result<f64, EvalError>;
}

/// Returns the stored labels; useful as a reference predictor.
pub struct LabelPredictor;

impl HardnessPredictor for LabelPredictor {
    fn name(&self) -> String {
        "labels".into()
    }

    fn predict_half(&self, half: &SchemaHalf) -> Result<f64, EvalError> {
        half.hardness.ok_or_else(|| EvalError::Unlabeled(half.id.clone()))
    }
}

/// Evaluates `predictor` on `dataset`, or on the halves whose ids are in
/// `subset_ids` when given. Predictions are clamped to `[0, 1]`.
pub fn evaluate(
    predictor: &dyn HardnessPredictor,
    dataset: &Dataset,
    subset_ids: Option<&[String]>,
    subset_tag: Option<&str>,
) -> Result<EvaluationReport, EvalError> {
    let keep: Option<BTreeSet<&str>> = subset_ids.map(|ids| ids.iter().map(String::as_str).collect());
    let halves: Vec<&SchemaHalf> = dataset
        .halves
        .iter()
        .filter(|h| keep.as_ref().is_none_or(|k| k.contains(h.id.as_str())))
        .collect();
    if halves.is_empty() {
        return Err(if keep.is_some() { EvalError::EmptySubset } else { EvalError::Empty });
    }
    let mut pred = Vec::with_capacity(halves.len());
    let mut label = Vec::with_capacity(halves.len());
    for h in halves {
        label.push(h.hardness.ok_or_else(|| EvalError::Unlabeled(h.id.clone()))?);
        pred.push(predictor.predict_half(h)?.clamp(0.0, 1.0));
    }
    EvaluationReport::from_predictions(&pred, &label, subset_tag.map(str::to_string))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub label: String,
    pub n: usize,
    pub warmup: usize,
    pub mean_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
}

impl TimingReport {
    fn from_samples(label: &str, warmup: usize, mut ms: Vec<f64>) -> Self {
        ms.sort_by(f64::total_cmp);
        let n = ms.len();
        // nearest-rank percentile
        let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
        Self {
            label: label.to_string(),
            n,
            warmup,
            mean_ms: ms.iter().sum::<f64>() / n as f64,
            p95_ms: ms[rank - 1],
            max_ms: ms[n - 1],
        }
    }
}

/// Runs `f` on the first `warmup` halves untimed, then times it on each of
/// the remaining halves one at a time.
pub fn benchmark_with<F>(label: &str, halves: &[SchemaHalf], warmup: usize, mut f: F) -> Result<TimingReport, EvalError>
where
    F: FnMut(&SchemaHalf) -> Result<(), EvalError>,
{
    if halves.is_empty() {
        return Err(EvalError::Empty);
    }
    if warmup >= halves.len() {
        return Err(EvalError::Warmup {
            warmup,
            n: halves.len(),
        });
    }
    for h in &halves[..warmup] {
        f(h)?;
    }
    let mut ms = Vec::with_capacity(halves.len() - warmup);
    for h in &halves[warmup..] {
        let t = Instant::now();
        f(h)?;
        ms.push(t.elapsed().as_secs_f64() * 1e3);
    }
    Ok(TimingReport::from_samples(label, warmup, ms))
}

pub fn benchmark_latency(predictor: &dyn HardnessPredictor, halves: &[SchemaHalf], warmup: usize) -> Result<TimingReport, EvalError> {
    benchmark_with(&predictor.name(), halves, warmup, |h| predictor.predict_half(h).map(drop))
}

/// Aligned text table with the columns System, MAE, Correlation Coefficient,
/// Accuracy. MAE is printed in percent.
pub fn render_table(rows: &[(String, EvaluationReport)]) -> String {
    let header = ["System", "MAE", "Correlation Coefficient", "Accuracy"];
    let body: Vec<[String; 4]> = rows
        .iter()
        .map(|(name, r)| {
            let system = match &r.subset_tag {
                Some(t) => format!("{name} [{t}]"),
                None => name.clone(),
            };
            [
                system,
                format!("{:.2}", r.mae_percent),
                r.pearson.map_or("undefined".to_string(), |p| format!("{p:.2}")),
                format!("{:.2}", r.accuracy),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &body {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: [&str; 4]| {
        let _ = write!(out, "{:<w0$}", cells[0], w0 = width[0]);
        for (c, w) in cells[1..].iter().zip(&width[1..]) {
            let _ = write!(out, "  {c:>w$}");
        }
        out.push('\n');
    };
    line(&mut out, header);
    out.push_str(&"-".repeat(width.iter().sum::<usize>() + 6));
    out.push('\n');
    for row in &body {
        line(&mut out, [&row[0], &row[1], &row[2], &row[3]]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        let y = [0.2, 0.5, 0.9];
        assert_eq!(mean_absolute_error(&y, &y).unwrap(), 0.0);
        assert_eq!(accuracy_score(&y, &y).unwrap(), 100.0);
        assert!((accuracy_score(&[0.9], &[0.9 - 0.0836]).unwrap() - 91.64).abs() < 1e-9);
        let x = [1.0, 2.0, 3.0, 4.0];
        let lin: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &lin).unwrap().unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&x, &neg).unwrap().unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&[1.0; 4], &x).unwrap(), None);
        assert!(matches!(pearson(&x, &x[1..]), Err(EvalError::LengthMismatch(4, 3))));
        assert!(matches!(mean_absolute_error(&[], &[]), Err(EvalError::Empty)));
    }

    #[test]
    fn evaluate_subsets() {
        let mut d = Dataset::new(
            (0..6)
                .map(|i| SchemaHalf::new(format!("h{i}"), "a met b", "who met b?", "a", "b").with_hardness(i as f64 / 6.0))
                .collect(),
            "t",
        )
        .unwrap();
        let full = evaluate(&LabelPredictor, &d, None, None).unwrap();
        assert_eq!(full.accuracy, 100.0);
        assert!((full.pearson.unwrap() - 1.0).abs() < 1e-12);
        let ids = d.ids();
        let all = evaluate(&LabelPredictor, &d, Some(&ids), None).unwrap();
        assert_eq!(all, full);
        let none = evaluate(&LabelPredictor, &d, Some(&["zz".to_string()]), Some("x"));
        assert!(matches!(none, Err(EvalError::EmptySubset)));
        d.halves[0].hardness = None;
        assert!(matches!(evaluate(&LabelPredictor, &d, None, None), Err(EvalError::Unlabeled(_))));
    }

    #[test]
    fn timing() {
        let halves: Vec<SchemaHalf> = (0..5).map(|i| SchemaHalf::new(format!("h{i}"), "s", "q", "a", "b")).collect();
        let t = benchmark_with("noop", &halves, 1, |_| Ok(())).unwrap();
        assert_eq!(t.n, 4);
        assert!(t.mean_ms >= 0.0 && t.p95_ms <= t.max_ms);
        assert!(matches!(benchmark_with("noop", &halves, 5, |_| Ok(())), Err(EvalError::Warmup { .. })));
        assert!(matches!(benchmark_with("noop", &[], 0, |_| Ok(())), Err(EvalError::Empty)));
    }

    #[test]
    fn table_layout() {
        let r = EvaluationReport::from_predictions(&[0.9, 0.9], &[0.8, 1.0], None).unwrap();
        let t = render_table(&[("constant".into(), r)]);
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[0].starts_with("System"));
        assert!(lines[0].ends_with("Accuracy"));
        assert!(lines[2].contains("10.00") && lines[2].contains("undefined") && lines[2].contains("90.00"));
    }

    proptest! {
        #[test]
        fn accuracy_identity(v in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..50)) {
            let (p, y): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            let s = accuracy_score(&p, &y).unwrap() + 100.0 * mean_absolute_error(&p, &y).unwrap();
            prop_assert!((s - 100.0).abs() < 1e-12);
        }

        #[test]
        fn pearson_affine(v in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 3..40), a in 0.1..4.0f64, b in -3.0..3.0f64, neg: bool) {
            let (x, y): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            let a = if neg { -a } else { a };
            let ax: Vec<f64> = x.iter().map(|t| a * t + b).collect();
            if let (Some(r0), Some(r1)) = (pearson(&x, &y).unwrap(), pearson(&ax, &y).unwrap()) {
                prop_assert!((r1 - a.signum() * r0).abs() < 1e-9);
            }
        }
    }
}
