use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Feature, FeatureError, FeatureKind, FeatureValue, FeatureVector};

/// Label dictionary for the categorical features, frozen after training.
/// Known labels get codes 1..=n in sorted order; unseen labels encode as 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    categories: BTreeMap<String, Vec<String>>,
}

impl FeatureSchema {
    pub fn build<'a>(vectors: impl IntoIterator<Item = &'a FeatureVector>) -> Self {
        let mut seen: BTreeMap<String, BTreeSet<String>> = Feature::ALL
            .iter()
            .filter(|f| f.kind() == FeatureKind::Categorical)
            .map(|f| (f.name().to_string(), BTreeSet::new()))
            .collect();
        for v in vectors {
            for (f, val) in Feature::ALL.iter().zip(&v.values) {
                if let FeatureValue::Cat(s) = val {
                    seen.entry(f.name().to_string()).or_default().insert(s.clone());
                }
            }
        }
        Self {
            categories: seen.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect(),
        }
    }

    pub fn code(&self, f: Feature, label: &str) -> f64 {
        self.categories
            .get(f.name())
            .and_then(|labels| labels.binary_search_by(|l| l.as_str().cmp(label)).ok())
            .map_or(0.0, |i| (i + 1) as f64)
    }

    pub fn labels(&self, f: Feature) -> &[String] {
        self.categories.get(f.name()).map_or(&[], Vec::as_slice)
    }

    pub fn encode_numeric(&self, v: &FeatureVector) -> Vec<f64> {
        Feature::ALL
            .iter()
            .zip(&v.values)
            .map(|(&f, val)| match val {
                FeatureValue::Int(x) => *x as f64,
                FeatureValue::Cat(s) => self.code(f, s),
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, FeatureError> {
        let schema: Self = serde_json::from_str(s).map_err(|e| FeatureError::Schema(e.to_string()))?;
        for (name, labels) in &schema.categories {
            if Feature::from_name(name).is_none_or(|f| f.kind() != FeatureKind::Categorical) {
                return Err(FeatureError::Schema(format!("`{name}` is not a categorical feature")));
            }
            if labels.windows(2).any(|w| w[0] >= w[1]) {
                return Err(FeatureError::Schema(format!("labels of `{name}` are not sorted and unique")));
            }
        }
        Ok(schema)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_with(st: &str, sp: &str) -> FeatureVector {
        let mut v = FeatureVector::sentinel("x");
        v.set_cat(Feature::ST, st);
        v.set_cat(Feature::SP, sp);
        v.set_int(Feature::SL, 9);
        v
    }

    #[test]
    fn label_codes() {
        let train = [vec_with("complex", "SV because SV"), vec_with("simple", "SV")];
        let schema = FeatureSchema::build(&train);
        assert_eq!(schema.labels(Feature::ST), ["complex", "simple"]);
        let enc = schema.encode_numeric(&train[0]);
        assert_eq!(enc.len(), 47);
        assert_eq!(enc[Feature::ST.index()], 1.0);
        assert_eq!(enc[Feature::SL.index()], 9.0);
        assert_eq!(enc[Feature::CNT.index()], -1.0);
        let unseen = schema.encode_numeric(&vec_with("compound", "SV or SV"));
        assert_eq!(unseen[Feature::ST.index()], 0.0);
        assert_eq!(unseen[Feature::SP.index()], 0.0);
        let back = FeatureSchema::from_json(&schema.to_json()).unwrap();
        assert_eq!(back, schema);
    }

    #[test]
    fn injective_on_dictionary() {
        let labels = ["a", "b", "c", "SV and SV", "SV"];
        let train: Vec<_> = labels.iter().map(|l| vec_with("simple", l)).collect();
        let schema = FeatureSchema::build(&train);
        let codes: BTreeSet<u64> = labels.iter().map(|l| schema.code(Feature::SP, l) as u64).collect();
        assert_eq!(codes.len(), labels.len());
        assert!(!codes.contains(&0));
    }
}
