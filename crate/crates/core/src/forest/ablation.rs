use serde::{Deserialize, Serialize};

use super::{fit_forest, ForestError, ForestHyperparams};
use crate::eval::EvaluationReport;
use crate::features::Component;

/// Numeric design matrix with named columns and one target per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl LabeledMatrix {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self, ForestError> {
        if rows.len() != targets.len() {
            return Err(ForestError::DimensionMismatch(format!("{} rows, {} targets", rows.len(), targets.len())));
        }
        if let Some(r) = rows.iter().position(|r| r.len() != columns.len()) {
            return Err(ForestError::DimensionMismatch(format!("row {r} does not have {} columns", columns.len())));
        }
        Ok(Self { columns, rows, targets })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Copy without the columns at `drop`.
    pub fn without(&self, drop: &[usize]) -> Self {
        let keep: Vec<usize> = (0..self.columns.len()).filter(|j| !drop.contains(j)).collect();
        Self {
            columns: keep.iter().map(|&j| self.columns[j].clone()).collect(),
            rows: self.rows.iter().map(|r| keep.iter().map(|&j| r[j]).collect()).collect(),
            targets: self.targets.clone(),
        }
    }

    /// Fits a forest on `self` and evaluates it on `test`.
    pub fn fit_and_evaluate(&self, test: &LabeledMatrix, hp: &ForestHyperparams) -> Result<EvaluationReport, ForestError> {
        if self.columns != test.columns {
            return Err(ForestError::DimensionMismatch("train and test columns differ".into()));
        }
        let model = fit_forest(&self.rows, &self.targets, hp)?;
        let pred: Vec<f64> = model.predict_batch(&test.rows)?.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        Ok(EvaluationReport::from_predictions(&pred, &test.targets, None)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    /// the group left out
    pub component: String,
    pub accuracy: f64,
    pub correlation: Option<f64>,
    pub mae_unit: f64,
}

/// The twelve feature components as (name, feature column names).
pub fn component_groups() -> Vec<(String, Vec<String>)> {
    Component::ALL
        .iter()
        .map(|c| (c.name().to_string(), c.features().iter().map(|f| f.name().to_string()).collect()))
        .collect()
}

/// Retrains once per group with that group's columns removed and reports
/// test metrics, in group order.
pub fn importance_by_ablation(
    train: &LabeledMatrix,
    test: &LabeledMatrix,
    hp: &ForestHyperparams,
    groups: &[(String, Vec<String>)],
) -> Result<Vec<AblationRow>, ForestError> {
    if groups.is_empty() {
        return Err(ForestError::NoGroups);
    }
    let mut resolved = Vec::with_capacity(groups.len());
    for (name, cols) in groups {
        if cols.is_empty() {
            return Err(ForestError::UnknownGroup(name.clone()));
        }
        let idx = cols
            .iter()
            .map(|c| train.column_index(c).ok_or_else(|| ForestError::UnknownGroup(format!("{name}/{c}"))))
            .collect::<Result<Vec<_>, _>>()?;
        resolved.push((name, idx));
    }
    resolved
        .into_iter()
        .map(|(name, idx)| {
            let r = train.without(&idx).fit_and_evaluate(&test.without(&idx), hp)?;
            Ok(AblationRow {
                component: name.clone(),
                accuracy: r.accuracy,
                correlation: r.pearson,
                mae_unit: r.mae_unit,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matrix(seed: u64, n: usize) -> LabeledMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0..5) as f64, rng.gen(), 1.0]).collect();
        let targets = rows.iter().map(|r| 0.5 + 0.08 * r[0] + 0.1 * r[1] * rng.gen::<f64>()).map(|v: f64| v.min(1.0)).collect();
        LabeledMatrix::new(vec!["a".into(), "b".into(), "dummy".into()], rows, targets).unwrap()
    }

    #[test]
    fn groups_and_errors() {
        assert_eq!(component_groups().len(), 12);
        assert_eq!(component_groups().iter().map(|g| g.1.len()).sum::<usize>(), 47);
        let (tr, te) = (matrix(0, 60), matrix(1, 30));
        let hp = ForestHyperparams { n_trees: 5, ..Default::default() };
        assert!(matches!(importance_by_ablation(&tr, &te, &hp, &[]), Err(ForestError::NoGroups)));
        let bad = [("x".to_string(), vec!["zz".to_string()])];
        assert!(matches!(importance_by_ablation(&tr, &te, &hp, &bad), Err(ForestError::UnknownGroup(_))));
    }

    #[test]
    fn constant_dummy_group_is_irrelevant() {
        let (tr, te) = (matrix(2, 80), matrix(3, 40));
        let hp = ForestHyperparams { n_trees: 15, ..Default::default() };
        let full = tr.fit_and_evaluate(&te, &hp).unwrap();
        let groups = [("dummy".to_string(), vec!["dummy".to_string()]), ("a".to_string(), vec!["a".to_string()])];
        let rows = importance_by_ablation(&tr, &te, &hp, &groups).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].accuracy, full.accuracy);
        assert_eq!(rows[0].correlation, full.pearson);
        assert!(rows[1].accuracy < full.accuracy);
    }
}
