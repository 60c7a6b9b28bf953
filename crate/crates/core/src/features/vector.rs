use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! features {
    ($($name:ident => $component:ident, $kind:ident;)*) => {
        /// One named feature. Declaration order is the canonical column order.
        #[allow(non_camel_case_types)]
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Feature {
            $($name,)*
        }

        impl Feature {
            pub const ALL: &'static [Feature] = &[$(Feature::$name,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Feature::$name => stringify!($name),)*
                }
            }

            pub fn component(self) -> Component {
                match self {
                    $(Feature::$name => Component::$component,)*
                }
            }

            pub fn kind(self) -> FeatureKind {
                match self {
                    $(Feature::$name => FeatureKind::$kind,)*
                }
            }
        }
    };
}

features! {
    ST => SentencePattern, Categorical;
    SP => SentencePattern, Categorical;
    STN => Negation, Binary;
    QTN => Negation, Binary;
    SEM => SemanticRelations, Choice;
    SL => NumberOfWords, Count;
    WN => WordRelations, Count;
    WP => WordRelations, Count;
    HN => WordRelations, Count;
    VF => WordRelations, Count;
    JF => WordRelations, Count;
    GL1i1 => SearchQueries, Binary;
    GL1i2 => SearchQueries, Binary;
    GL2i1 => SearchQueries, Binary;
    GL2i2 => SearchQueries, Binary;
    GL3i1 => SearchQueries, Binary;
    GL3i2 => SearchQueries, Binary;
    GL4i1 => SearchQueries, Binary;
    GL4i2 => SearchQueries, Binary;
    GLF1i1 => SearchQueries, Binary;
    GLF1i2 => SearchQueries, Binary;
    GLF2i1 => SearchQueries, Binary;
    GLF2i2 => SearchQueries, Binary;
    GLF3i1 => SearchQueries, Binary;
    GLF3i2 => SearchQueries, Binary;
    GLF4i1 => SearchQueries, Binary;
    GLF4i2 => SearchQueries, Binary;
    CN => Relatedness, Choice;
    CNF => Relatedness, Choice;
    CNT => DiscourseConnective, Choice;
    NCH => NarrativeChains, Choice;
    RP1i1 => PolarityRules, Binary;
    RP1i2 => PolarityRules, Binary;
    RP2i1 => PolarityRules, Categorical;
    RP2i2 => PolarityRules, Categorical;
    RP3i1 => PolarityRules, Categorical;
    RP3i2 => PolarityRules, Categorical;
    RPTL => PolarityRules, Choice;
    OP1i1 => PolarityAnalyzer, Binary;
    OP1i2 => PolarityAnalyzer, Binary;
    OP2i1 => PolarityAnalyzer, Categorical;
    OP2i2 => PolarityAnalyzer, Categorical;
    OP3i1 => PolarityAnalyzer, Categorical;
    OP3i2 => PolarityAnalyzer, Categorical;
    OPTL => PolarityAnalyzer, Choice;
    TBSPOL => PolarityScores, Categorical;
    TBQPOL => PolarityScores, Categorical;
}

pub const N_FEATURES: usize = 47;

impl Feature {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_name(name: &str) -> Option<Feature> {
        Feature::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// The partner of an `i1`/`i2` feature, if this is one.
    pub fn pair_partner(self) -> Option<Feature> {
        let name = self.name();
        let other = if let Some(base) = name.strip_suffix("i1") {
            format!("{base}i2")
        } else if let Some(base) = name.strip_suffix("i2") {
            format!("{base}i1")
        } else {
            return None;
        };
        Feature::from_name(&other)
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// 0 or 1
    Binary,
    /// 1 (first candidate), 2 (second) or -1 (undetermined)
    Choice,
    /// non-negative integer
    Count,
    /// label string
    Categorical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    SentencePattern,
    Negation,
    SemanticRelations,
    NumberOfWords,
    WordRelations,
    SearchQueries,
    Relatedness,
    DiscourseConnective,
    NarrativeChains,
    PolarityRules,
    PolarityAnalyzer,
    PolarityScores,
}

impl Component {
    pub const ALL: [Component; 12] = [
        Component::SentencePattern,
        Component::Negation,
        Component::SemanticRelations,
        Component::NumberOfWords,
        Component::WordRelations,
        Component::SearchQueries,
        Component::Relatedness,
        Component::DiscourseConnective,
        Component::NarrativeChains,
        Component::PolarityRules,
        Component::PolarityAnalyzer,
        Component::PolarityScores,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::SentencePattern => "sentence-pattern",
            Component::Negation => "negation",
            Component::SemanticRelations => "semantic-relations",
            Component::NumberOfWords => "number-of-words",
            Component::WordRelations => "word-relations",
            Component::SearchQueries => "search-queries",
            Component::Relatedness => "relatedness",
            Component::DiscourseConnective => "discourse-connective",
            Component::NarrativeChains => "narrative-chains",
            Component::PolarityRules => "polarity-rules",
            Component::PolarityAnalyzer => "polarity-analyzer",
            Component::PolarityScores => "polarity-scores",
        }
    }

    pub fn from_name(name: &str) -> Option<Component> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn features(self) -> Vec<Feature> {
        Feature::ALL.iter().copied().filter(|f| f.component() == self).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureValue {
    Int(i64),
    Cat(String),
}

impl FeatureValue {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            FeatureValue::Int(v) => Some(*v),
            FeatureValue::Cat(_) => None,
        }
    }

    pub fn as_cat(&self) -> Option<&str> {
        match self {
            FeatureValue::Cat(s) => Some(s),
            FeatureValue::Int(_) => None,
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Int(v) => write!(f, "{v}"),
            FeatureValue::Cat(s) => f.write_str(s),
        }
    }
}

/// Which components produced evidence (rather than sentinels) for a half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage(pub [bool; 12]);

impl Default for Coverage {
    fn default() -> Self {
        Coverage([false; 12])
    }
}

impl Coverage {
    pub fn get(&self, c: Component) -> bool {
        self.0[c.index()]
    }

    pub fn set(&mut self, c: Component, applicable: bool) {
        self.0[c.index()] = applicable;
    }
}

/// All features of one half, in [`Feature::ALL`] order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub id: String,
    pub values: Vec<FeatureValue>,
    pub coverage: Coverage,
}

impl FeatureVector {
    /// Vector of sentinels: 0 for binaries and counts, -1 for choices,
    /// neutral labels for categoricals.
    pub fn sentinel(id: impl Into<String>) -> Self {
        let values = Feature::ALL.iter().map(|&f| sentinel_value(f)).collect();
        Self {
            id: id.into(),
            values,
            coverage: Coverage::default(),
        }
    }

    pub fn get(&self, f: Feature) -> &FeatureValue {
        &self.values[f.index()]
    }

    pub fn int(&self, f: Feature) -> i64 {
        self.get(f).as_int().unwrap_or_else(|| panic!("{f} is categorical"))
    }

    pub fn cat(&self, f: Feature) -> &str {
        self.get(f).as_cat().unwrap_or_else(|| panic!("{f} is numeric"))
    }

    pub fn set(&mut self, f: Feature, v: FeatureValue) {
        self.values[f.index()] = v;
    }

    pub fn set_int(&mut self, f: Feature, v: i64) {
        self.set(f, FeatureValue::Int(v));
    }

    pub fn set_cat(&mut self, f: Feature, v: impl Into<String>) {
        self.set(f, FeatureValue::Cat(v.into()));
    }
}

pub fn sentinel_value(f: Feature) -> FeatureValue {
    match f.kind() {
        FeatureKind::Binary | FeatureKind::Count => FeatureValue::Int(0),
        FeatureKind::Choice => FeatureValue::Int(-1),
        FeatureKind::Categorical => FeatureValue::Cat(match f {
            Feature::ST => "simple".into(),
            Feature::SP => "SV".into(),
            Feature::TBSPOL | Feature::TBQPOL => "neutral".into(),
            _ => "neutral-neutral".into(),
        }),
    }
}
