//! Run configuration and step-table documents.

use std::fs;
use std::path::{Path, PathBuf};

use lacewalk_core::model::{build_step_distribution, nearest_neighbor_table, Family, LatticePoint, StepDistribution};
use lacewalk_core::scalar::{exact_from_decimal_f64, exact_to_decimal, parse_exact, Exact};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}:{line}:{column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A number given either as a JSON number or as a decimal / `p/q` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberText {
    Number(f64),
    Text(String),
}

impl NumberText {
    pub fn to_exact(&self) -> Result<Exact, String> {
        match self {
            NumberText::Number(v) => exact_from_decimal_f64(*v).map_err(|e| e.to_string()),
            NumberText::Text(s) => parse_exact(s).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    #[default]
    Float,
    Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    /// `exponential`, `gaussian` or `nearest-neighbor`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub range: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    /// Step-table document, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct RunConfig {
    pub schema: u32,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<NumberText>,
    pub step: StepSpec,
    #[serde(default)]
    pub arithmetic: Arithmetic,
    /// Maximum node expansions per enumeration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub coords: Vec<i32>,
    pub weight: NumberText,
}

/// `{dimension, kappa?, entries: [{coords, weight}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDocument {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<NumberText>,
    pub entries: Vec<TableEntry>,
}

impl StepDocument {
    /// Weights as decimal strings (`p/q` when the decimal does not terminate);
    /// float-only weights use the shortest round-trip decimal.
    pub fn from_distribution(dist: &StepDistribution, kappa: Option<&Exact>) -> Self {
        StepDocument {
            dimension: dist.dim(),
            kappa: kappa.map(|k| NumberText::Text(exact_to_decimal(k))),
            entries: dist
                .entries()
                .iter()
                .map(|e| TableEntry {
                    coords: e.point.coords().to_vec(),
                    weight: NumberText::Text(match &e.exact {
                        Some(q) => exact_to_decimal(q),
                        None => format!("{:e}", e.weight),
                    }),
                })
                .collect(),
        }
    }

    pub fn table(&self) -> Result<Vec<(LatticePoint, Exact)>, String> {
        self.entries
            .iter()
            .map(|e| Ok((LatticePoint::new(e.coords.clone()), e.weight.to_exact()?)))
            .collect()
    }
}

/// A validated configuration with its distribution built.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: RunConfig,
    pub kappa: Exact,
    pub distribution: StepDistribution,
    /// Step spec with any table inlined, for hashing.
    pub step_key: serde_json::Value,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load(path: &Path) -> Result<Resolved, ConfigError> {
    let config: RunConfig = parse_json(&read(path)?, path)?;
    resolve(config, path.parent().unwrap_or(Path::new(".")), path)
}

pub fn resolve(config: RunConfig, base: &Path, origin: &Path) -> Result<Resolved, ConfigError> {
    let invalid = |message: String| ConfigError::Invalid {
        path: origin.display().to_string(),
        message,
    };
    if config.schema != SCHEMA_VERSION {
        return Err(invalid(format!(
            "unsupported schema {}, expected {SCHEMA_VERSION}",
            config.schema
        )));
    }
    if config.dimension == 0 {
        return Err(invalid("dimension must be at least 1".into()));
    }
    if let Some(b) = config.budget {
        if !(b.is_finite() && b >= 1.0) {
            return Err(invalid(format!("budget must be a positive count, got {b}")));
        }
    }
    let spec = &config.step;
    let mut table_kappa = None;
    let (distribution, step_key) = match (&spec.family, &spec.table) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(invalid("step needs exactly one of `family` or `table`".into()));
        }
        (None, Some(table)) => {
            if spec.range.is_some() || spec.cutoff.is_some() {
                return Err(invalid("`L` and `cutoff` do not apply to tables".into()));
            }
            let table_path = base.join(table);
            let doc: StepDocument = parse_json(&read(&table_path)?, &table_path)?;
            if doc.dimension != config.dimension {
                return Err(invalid(format!(
                    "table dimension {} differs from config dimension {}",
                    doc.dimension, config.dimension
                )));
            }
            table_kappa = doc.kappa.clone();
            let entries = doc.table().map_err(invalid)?;
            let dist = build_step_distribution(Family::Table(entries), 1.0, config.dimension, 1.0)
                .map_err(|e| invalid(e.to_string()))?;
            let key = serde_json::to_value(StepDocument {
                kappa: None,
                ..doc
            })
            .expect("serializable");
            (dist, key)
        }
        (Some(name), None) => {
            let dist = if name == "nearest-neighbor" {
                if spec.range.is_some() || spec.cutoff.is_some() {
                    return Err(invalid("`L` and `cutoff` do not apply to nearest-neighbor".into()));
                }
                build_step_distribution(Family::Table(nearest_neighbor_table(config.dimension)), 1.0, config.dimension, 1.0)
            } else {
                let family = Family::from_name(name).map_err(|e| invalid(e.to_string()))?;
                let range = spec.range.ok_or_else(|| invalid("profile families need `L`".into()))?;
                let cutoff = spec.cutoff.ok_or_else(|| invalid("profile families need `cutoff`".into()))?;
                build_step_distribution(family, range, config.dimension, cutoff)
            }
            .map_err(|e| invalid(e.to_string()))?;
            (dist, serde_json::to_value(spec).expect("serializable"))
        }
    };
    let kappa = config
        .kappa
        .as_ref()
        .or(table_kappa.as_ref())
        .ok_or_else(|| invalid("`kappa` is required (in the config or the step table)".into()))?
        .to_exact()
        .map_err(invalid)?;
    if kappa < Exact::from_integer(0.into()) {
        return Err(invalid("kappa must be nonnegative".into()));
    }
    let distribution = match config.arithmetic {
        Arithmetic::Rational => distribution.with_exact_weights(),
        Arithmetic::Float => distribution,
    };
    Ok(Resolved {
        config,
        kappa,
        distribution,
        step_key,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn parses_profile_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "c.json",
            r#"{"schema":1,"dimension":2,"kappa":"0.02","step":{"family":"exponential","L":1,"cutoff":2}}"#,
        );
        let r = load(&p).unwrap();
        assert_eq!(r.kappa, parse_exact("1/50").unwrap());
        assert_eq!(r.distribution.dim(), 2);
        assert_eq!(r.config.arithmetic, Arithmetic::Float);
    }

    #[test]
    fn syntax_error_has_position() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "c.json", "{\n  \"schema\": 1,\n  \"dimension\": ,\n}");
        match load(&p) {
            Err(ConfigError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_fields_and_double_specs() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "c.json",
            r#"{"schema":1,"dimension":1,"kappa":0,"step":{"family":"gaussian","L":1,"cutoff":1},"extra":3}"#,
        );
        assert!(matches!(load(&p), Err(ConfigError::Syntax { .. })));
        let p = write(
            dir.path(),
            "d.json",
            r#"{"schema":1,"dimension":1,"kappa":0,"step":{"family":"gaussian","table":"t.json"}}"#,
        );
        assert!(matches!(load(&p), Err(ConfigError::Invalid { .. })));
        let p = write(
            dir.path(),
            "e.json",
            r#"{"schema":1,"dimension":1,"kappa":-1,"step":{"family":"nearest-neighbor"}}"#,
        );
        assert!(matches!(load(&p), Err(ConfigError::Invalid { .. })));
    }

    #[test]
    fn table_documents_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "t.json",
            r#"{"dimension":1,"kappa":"1/10","entries":[{"coords":[1],"weight":"0.3"},{"coords":[-1],"weight":"0.3"},{"coords":[2],"weight":"0.2"},{"coords":[-2],"weight":"0.2"}]}"#,
        );
        let p = write(
            dir.path(),
            "c.json",
            r#"{"schema":1,"dimension":1,"step":{"table":"t.json"},"arithmetic":"rational"}"#,
        );
        let r = load(&p).unwrap();
        assert_eq!(r.kappa, parse_exact("0.1").unwrap());
        let doc = StepDocument::from_distribution(&r.distribution, Some(&r.kappa));
        let text = serde_json::to_string(&doc).unwrap();
        let back: StepDocument = serde_json::from_str(&text).unwrap();
        let rebuilt = build_step_distribution(Family::Table(back.table().unwrap()), 1.0, 1, 1.0).unwrap();
        assert_eq!(rebuilt, r.distribution);
        assert_eq!(back.kappa, Some(NumberText::Text("0.1".into())));
    }
}
