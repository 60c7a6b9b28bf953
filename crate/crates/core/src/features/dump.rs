//! Feature dumps: CSV with one row per half (`id`, the 47 features in
//! enumeration order, then one `cov:<component>` column per component) and an
//! equivalent JSON document.

use serde::{Deserialize, Serialize};

use super::{Component, Coverage, Feature, FeatureError, FeatureKind, FeatureValue, FeatureVector};

pub const DUMP_VERSION: u32 = 1;

fn header() -> Vec<String> {
    std::iter::once("id".to_string())
        .chain(Feature::ALL.iter().map(|f| f.name().to_string()))
        .chain(Component::ALL.iter().map(|c| format!("cov:{}", c.name())))
        .collect()
}

pub fn to_csv(vectors: &[FeatureVector]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header()).expect("in-memory write");
    for v in vectors {
        let row = std::iter::once(v.id.clone())
            .chain(v.values.iter().map(ToString::to_string))
            .chain(v.coverage.0.iter().map(|&b| u8::from(b).to_string()));
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn parse_value(f: Feature, s: &str, record: usize) -> Result<FeatureValue, FeatureError> {
    if f.kind() == FeatureKind::Categorical {
        return Ok(FeatureValue::Cat(s.to_string()));
    }
    s.parse::<i64>().map(FeatureValue::Int).map_err(|_| FeatureError::Parse {
        record,
        message: format!("{f} expects an integer, got `{s}`"),
    })
}

pub fn parse_csv(content: &str) -> Result<Vec<FeatureVector>, FeatureError> {
    let mut r = csv::ReaderBuilder::new().from_reader(content.as_bytes());
    let got: Vec<String> = r
        .headers()
        .map_err(|e| FeatureError::Header(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if got != header() {
        return Err(FeatureError::Header(format!("got {} columns starting {:?}", got.len(), got.first())));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| FeatureError::Parse {
            record: i + 1,
            message: e.to_string(),
        })?;
        let values = Feature::ALL
            .iter()
            .enumerate()
            .map(|(k, &f)| parse_value(f, &rec[k + 1], i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        let mut coverage = Coverage::default();
        for (k, c) in Component::ALL.iter().enumerate() {
            coverage.set(*c, &rec[1 + Feature::ALL.len() + k] == "1");
        }
        out.push(FeatureVector {
            id: rec[0].to_string(),
            values,
            coverage,
        });
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct JsonDump {
    version: u32,
    features: Vec<String>,
    components: Vec<String>,
    rows: Vec<JsonRow>,
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    id: String,
    values: Vec<FeatureValue>,
    coverage: Vec<bool>,
}

pub fn to_json(vectors: &[FeatureVector]) -> String {
    let dump = JsonDump {
        version: DUMP_VERSION,
        features: Feature::ALL.iter().map(|f| f.name().to_string()).collect(),
        components: Component::ALL.iter().map(|c| c.name().to_string()).collect(),
        rows: vectors
            .iter()
            .map(|v| JsonRow {
                id: v.id.clone(),
                values: v.values.clone(),
                coverage: v.coverage.0.to_vec(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&dump).expect("dump serializes") + "\n"
}

pub fn parse_json(content: &str) -> Result<Vec<FeatureVector>, FeatureError> {
    let dump: JsonDump = serde_json::from_str(content).map_err(|e| FeatureError::Parse {
        record: 0,
        message: e.to_string(),
    })?;
    if dump.version != DUMP_VERSION {
        return Err(FeatureError::Header(format!("unsupported dump version {}", dump.version)));
    }
    let names: Vec<&str> = Feature::ALL.iter().map(|f| f.name()).collect();
    if dump.features != names || dump.components.len() != Component::ALL.len() {
        return Err(FeatureError::Header("feature or component list differs".into()));
    }
    dump.rows
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let bad = |m: String| FeatureError::Parse { record: i + 1, message: m };
            if row.values.len() != names.len() || row.coverage.len() != 12 {
                return Err(bad("wrong number of values".into()));
            }
            for (f, v) in Feature::ALL.iter().zip(&row.values) {
                if (f.kind() == FeatureKind::Categorical) != v.as_cat().is_some() {
                    return Err(bad(format!("{f} has a value of the wrong kind")));
                }
            }
            let mut cov = [false; 12];
            cov.copy_from_slice(&row.coverage);
            Ok(FeatureVector {
                id: row.id,
                values: row.values,
                coverage: Coverage(cov),
            })
        })
        .collect()
}
