//! From-scratch regression learners over dense numeric feature matrices.

pub mod booster;
pub mod forest;
pub mod svr;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{DataTable, COL_AQI};

pub use booster::{fit_booster, BoosterModel, BoosterParams, TreeShape};
pub use forest::{fit_forest, ForestModel, ForestParams, MaxFeatures};
pub use svr::{fit_svr, SvrModel, SvrParams};
pub use tree::{fit_tree, DecisionTree, TreeParams};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Dense feature matrix + target extracted from a prepared table.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    /// Uses every numeric column except the target as a feature.
    /// The table must be dense (pipeline guarantees this after zero-fill).
    pub fn from_table(table: &DataTable, target: &str) -> Result<Dataset> {
        let feature_names: Vec<String> = table
            .numeric_column_names()
            .into_iter()
            .filter(|c| c != target)
            .collect();
        let target_cells = table.numeric(target)?;
        let n = table.n_rows();
        let mut x = vec![Vec::with_capacity(feature_names.len()); n];
        for name in &feature_names {
            let cells = table.numeric(name)?;
            for (row, cell) in cells.iter().enumerate() {
                let v = cell.ok_or_else(|| {
                    Error::Data(format!("missing cell in feature '{name}' row {row}"))
                })?;
                if !v.is_finite() {
                    return Err(Error::Data(format!(
                        "non-finite cell in feature '{name}' row {row}"
                    )));
                }
                x[row].push(v);
            }
        }
        let y = target_cells
            .iter()
            .enumerate()
            .map(|(row, c)| {
                c.filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Data(format!("missing target in row {row}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Dataset {
            feature_names,
            x,
            y,
        })
    }

    pub fn from_aqi_table(table: &DataTable) -> Result<Dataset> {
        Self::from_table(table, COL_AQI)
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }
}

/// Any trained artifact, tagged by family for serialization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ModelArtifact {
    Tree(DecisionTree),
    Forest(ForestModel),
    BoostLevel(BoosterModel),
    BoostOblivious(BoosterModel),
    Svr(SvrModel),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SavedModel {
    pub version: u32,
    pub model: ModelArtifact,
}

impl ModelArtifact {
    pub fn feature_names(&self) -> &[String] {
        match self {
            ModelArtifact::Tree(m) => &m.feature_names,
            ModelArtifact::Forest(m) => &m.feature_names,
            ModelArtifact::BoostLevel(m) | ModelArtifact::BoostOblivious(m) => &m.feature_names,
            ModelArtifact::Svr(m) => &m.feature_names,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            ModelArtifact::Tree(_) => "tree",
            ModelArtifact::Forest(_) => "forest",
            ModelArtifact::BoostLevel(_) => "boost-level",
            ModelArtifact::BoostOblivious(_) => "boost-oblivious",
            ModelArtifact::Svr(_) => "svr",
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SavedModel {
            version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<ModelArtifact> {
        let saved: SavedModel = serde_json::from_str(text)?;
        if saved.version != MODEL_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported model format version {}",
                saved.version
            )));
        }
        Ok(saved.model)
    }
}

fn check_schema(expected: &[String], actual: &[String]) -> Result<()> {
    if expected == actual {
        return Ok(());
    }
    let missing: Vec<&String> = expected.iter().filter(|c| !actual.contains(c)).collect();
    let extra: Vec<&String> = actual.iter().filter(|c| !expected.contains(c)).collect();
    Err(Error::SchemaMismatch(format!(
        "feature schema mismatch; missing: [{}], extra: [{}]",
        missing.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "),
        extra.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
    )))
}

/// Deterministic batch prediction with a schema fingerprint check.
pub fn predict(model: &ModelArtifact, data: &Dataset) -> Result<Vec<f64>> {
    check_schema(model.feature_names(), &data.feature_names)?;
    Ok(match model {
        ModelArtifact::Tree(m) => data.x.iter().map(|row| m.predict_row(row)).collect(),
        ModelArtifact::Forest(m) => m.predict(&data.x),
        ModelArtifact::BoostLevel(m) | ModelArtifact::BoostOblivious(m) => m.predict(&data.x),
        ModelArtifact::Svr(m) => m.predict(&data.x),
    })
}
