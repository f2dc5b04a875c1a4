//! Metrics, expanding-window grid search, residual analysis, and the
//! cross-model performance matrix.

use std::path::Path;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::models::{
    fit_booster, fit_forest, fit_svr, fit_tree, BoosterParams, Dataset, ForestParams, ModelArtifact,
    SvrParams, TreeParams, TreeShape,
};
use crate::stats::{mean, quantile_sorted, sample_std};
use crate::table::DataTable;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    /// None when the actuals are constant (SS_tot = 0)
    pub r2: Option<f64>,
    /// percent, over rows with a nonzero actual; None when none qualify
    pub mape: Option<f64>,
    pub n: usize,
    pub mape_excluded: usize,
}

pub fn metrics(y: &[f64], yhat: &[f64]) -> Result<MetricsReport> {
    if y.is_empty() {
        return Err(Error::EmptyInput("metrics need at least one row".into()));
    }
    if y.len() != yhat.len() {
        return Err(Error::Data(format!(
            "metrics got {} actuals but {} predictions",
            y.len(),
            yhat.len()
        )));
    }
    if y.iter().chain(yhat).any(|v| !v.is_finite()) {
        return Err(Error::Data("metrics require finite values".into()));
    }
    let n = y.len() as f64;
    let mse = y
        .iter()
        .zip(yhat)
        .map(|(a, p)| (a - p) * (a - p))
        .sum::<f64>()
        / n;
    let mae = y.iter().zip(yhat).map(|(a, p)| (a - p).abs()).sum::<f64>() / n;
    let y_mean = mean(y);
    let ss_tot: f64 = y.iter().map(|a| (a - y_mean) * (a - y_mean)).sum();
    let r2 = if ss_tot > 0.0 {
        Some(1.0 - mse * n / ss_tot)
    } else {
        None
    };
    let mut mape_sum = 0.0;
    let mut mape_n = 0usize;
    for (a, p) in y.iter().zip(yhat) {
        if *a != 0.0 {
            mape_sum += ((a - p) / a).abs();
            mape_n += 1;
        }
    }
    let mape = (mape_n > 0).then(|| 100.0 * mape_sum / mape_n as f64);
    Ok(MetricsReport {
        mse,
        rmse: mse.sqrt(),
        mae,
        r2,
        mape,
        n: y.len(),
        mape_excluded: y.len() - mape_n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelFamily {
    Tree,
    Forest,
    BoostLevel,
    BoostOblivious,
    Svr,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 5] = [
        ModelFamily::Tree,
        ModelFamily::Forest,
        ModelFamily::BoostLevel,
        ModelFamily::BoostOblivious,
        ModelFamily::Svr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Tree => "tree",
            ModelFamily::Forest => "forest",
            ModelFamily::BoostLevel => "boost-level",
            ModelFamily::BoostOblivious => "boost-oblivious",
            ModelFamily::Svr => "svr",
        }
    }

    fn known_parameters(self) -> &'static [&'static str] {
        match self {
            ModelFamily::Tree => &["max_depth", "min_samples_leaf"],
            ModelFamily::Forest => &[
                "n_estimators",
                "max_depth",
                "max_features",
                "min_samples_leaf",
                "bootstrap",
                "seed",
            ],
            ModelFamily::BoostLevel | ModelFamily::BoostOblivious => {
                &["iterations", "learning_rate", "depth", "seed"]
            }
            ModelFamily::Svr => &["c", "epsilon", "gamma", "tol", "max_steps"],
        }
    }
}

impl std::str::FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown model family '{s}' (expected one of tree, forest, boost-level, boost-oblivious, svr)"
                ))
            })
    }
}

impl std::fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub type ParamMap = IndexMap<String, Value>;

/// Hyperparameter grid: ordered axes, each with its declared value list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grid {
    pub axes: IndexMap<String, Vec<Value>>,
}

impl Grid {
    pub fn from_json(text: &str) -> Result<Grid> {
        let axes: IndexMap<String, Vec<Value>> = serde_json::from_str(text)?;
        Ok(Grid { axes })
    }

    pub fn n_combinations(&self) -> usize {
        self.axes.values().map(Vec::len).product()
    }

    /// Cartesian product in declared order: the last axis varies fastest.
    pub fn combinations(&self) -> Vec<ParamMap> {
        let mut combos: Vec<ParamMap> = vec![IndexMap::new()];
        for (name, values) in &self.axes {
            combos = combos
                .into_iter()
                .flat_map(|base| {
                    values.iter().map(move |v| {
                        let mut c = base.clone();
                        c.insert(name.clone(), v.clone());
                        c
                    })
                })
                .collect();
        }
        combos
    }

    fn validate(&self, family: ModelFamily) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::Config("grid has no axes".into()));
        }
        let known = family.known_parameters();
        for (name, values) in &self.axes {
            if values.is_empty() {
                return Err(Error::Config(format!("grid axis '{name}' has no values")));
            }
            if !known.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "family '{family}' has no parameter '{name}' (known: {})",
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }
}

fn param_f64(params: &ParamMap, name: &str, default: f64) -> Result<f64> {
    match params.get(name) {
        None => Ok(default),
        Some(v) => v.as_f64().ok_or_else(|| {
            Error::Config(format!("parameter '{name}' must be a number, got {v}"))
        }),
    }
}

fn param_usize(params: &ParamMap, name: &str, default: usize) -> Result<usize> {
    match params.get(name) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .map(|u| u as usize)
            .ok_or_else(|| Error::Config(format!("parameter '{name}' must be a non-negative integer, got {v}"))),
    }
}

fn param_opt_usize(params: &ParamMap, name: &str, default: Option<usize>) -> Result<Option<usize>> {
    match params.get(name) {
        None => Ok(default),
        Some(Value::Null) => Ok(None),
        Some(v) => v.as_u64().map(|u| Some(u as usize)).ok_or_else(|| {
            Error::Config(format!("parameter '{name}' must be an integer or null, got {v}"))
        }),
    }
}

/// Trains one model of the given family, applying `params` on top of the
/// family defaults and stamping the dataset's feature schema on the artifact.
pub fn fit_family(family: ModelFamily, data: &Dataset, params: &ParamMap) -> Result<ModelArtifact> {
    for name in params.keys() {
        if !family.known_parameters().contains(&name.as_str()) {
            return Err(Error::Config(format!(
                "family '{family}' has no parameter '{name}'"
            )));
        }
    }
    let artifact = match family {
        ModelFamily::Tree => {
            let tree_params = TreeParams {
                max_depth: param_opt_usize(params, "max_depth", None)?,
                min_samples_leaf: param_usize(params, "min_samples_leaf", 1)?,
            };
            let mut model = fit_tree(&data.x, &data.y, &tree_params)?;
            model.feature_names = data.feature_names.clone();
            ModelArtifact::Tree(model)
        }
        ModelFamily::Forest => {
            let defaults = ForestParams::default();
            let forest_params = ForestParams {
                n_estimators: param_usize(params, "n_estimators", defaults.n_estimators)?,
                max_depth: param_opt_usize(params, "max_depth", defaults.max_depth)?,
                max_features: match params.get("max_features") {
                    None => defaults.max_features,
                    Some(Value::String(s)) => s.parse()?,
                    Some(v) => {
                        return Err(Error::Config(format!(
                            "parameter 'max_features' must be a string, got {v}"
                        )))
                    }
                },
                min_samples_leaf: param_usize(params, "min_samples_leaf", defaults.min_samples_leaf)?,
                bootstrap: match params.get("bootstrap") {
                    None => defaults.bootstrap,
                    Some(Value::Bool(b)) => *b,
                    Some(v) => {
                        return Err(Error::Config(format!(
                            "parameter 'bootstrap' must be a boolean, got {v}"
                        )))
                    }
                },
                seed: param_usize(params, "seed", defaults.seed as usize)? as u64,
            };
            let mut model = fit_forest(&data.x, &data.y, &forest_params)?;
            model.feature_names = data.feature_names.clone();
            ModelArtifact::Forest(model)
        }
        ModelFamily::BoostLevel | ModelFamily::BoostOblivious => {
            let shape = if family == ModelFamily::BoostLevel {
                TreeShape::Levelwise
            } else {
                TreeShape::Oblivious
            };
            let defaults = BoosterParams::new(shape);
            let booster_params = BoosterParams {
                iterations: param_usize(params, "iterations", defaults.iterations)?,
                learning_rate: param_f64(params, "learning_rate", defaults.learning_rate)?,
                depth: param_usize(params, "depth", defaults.depth)?,
                shape,
                tolerance: defaults.tolerance,
                seed: param_usize(params, "seed", defaults.seed as usize)? as u64,
            };
            let mut model = fit_booster(&data.x, &data.y, &booster_params)?;
            model.feature_names = data.feature_names.clone();
            match family {
                ModelFamily::BoostLevel => ModelArtifact::BoostLevel(model),
                _ => ModelArtifact::BoostOblivious(model),
            }
        }
        ModelFamily::Svr => {
            let defaults = SvrParams::default();
            let svr_params = SvrParams {
                c: param_f64(params, "c", defaults.c)?,
                epsilon: param_f64(params, "epsilon", defaults.epsilon)?,
                gamma: match params.get("gamma") {
                    None | Some(Value::Null) => defaults.gamma,
                    Some(v) => Some(v.as_f64().ok_or_else(|| {
                        Error::Config(format!("parameter 'gamma' must be a number, got {v}"))
                    })?),
                },
                tol: param_f64(params, "tol", defaults.tol)?,
                max_steps: param_usize(params, "max_steps", defaults.max_steps)?,
            };
            let (mut model, _warnings) = fit_svr(&data.x, &data.y, &svr_params)?;
            model.feature_names = data.feature_names.clone();
            ModelArtifact::Svr(model)
        }
    };
    Ok(artifact)
}

#[derive(Debug, Clone, Serialize)]
pub struct CombinationScore {
    pub params: ParamMap,
    /// per-fold validation RMSE; +inf marks a failed fit
    pub fold_rmse: Vec<f64>,
    pub mean_rmse: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSearchResult {
    pub family: ModelFamily,
    pub grid: Grid,
    pub folds: usize,
    pub scores: Vec<CombinationScore>,
    pub best_index: usize,
    pub best_params: ParamMap,
    pub best_mean_rmse: f64,
    pub tie_break: &'static str,
}

/// Chronological expanding-window folds over `n` rows (already date-sorted):
/// fold i trains on blocks 0..=i and validates on block i+1.
pub fn expanding_folds(
    n: usize,
    folds: usize,
) -> Result<Vec<(std::ops::Range<usize>, std::ops::Range<usize>)>> {
    let blocks = folds + 1;
    let cut = |j: usize| j * n / blocks;
    let mut out = Vec::with_capacity(folds);
    for i in 0..folds {
        let train = 0..cut(i + 1);
        let validate = cut(i + 1)..cut(i + 2);
        if train.is_empty() || validate.is_empty() {
            return Err(Error::InsufficientData(format!(
                "{n} rows cannot form {folds} expanding-window folds"
            )));
        }
        out.push((train, validate));
    }
    Ok(out)
}

pub fn grid_search(
    family: ModelFamily,
    grid: &Grid,
    train: &DataTable,
    folds: usize,
) -> Result<GridSearchResult> {
    if folds < 1 {
        return Err(Error::Config("fold count must be at least 1".into()));
    }
    grid.validate(family)?;
    // date-major ordering so every validation block postdates its training rows
    let mut order: Vec<usize> = (0..train.n_rows()).collect();
    let dates = train.dates();
    order.sort_by_key(|&i| dates[i]);
    let sorted = train.filter_rows(&order);
    let data = Dataset::from_aqi_table(&sorted)?;
    let fold_ranges = expanding_folds(data.n_rows(), folds)?;
    let fold_sets: Vec<(Dataset, Dataset)> = fold_ranges
        .iter()
        .map(|(tr, va)| {
            let slice = |r: &std::ops::Range<usize>| Dataset {
                feature_names: data.feature_names.clone(),
                x: data.x[r.clone()].to_vec(),
                y: data.y[r.clone()].to_vec(),
            };
            (slice(tr), slice(va))
        })
        .collect();
    let combinations = grid.combinations();
    let scores: Vec<CombinationScore> = combinations
        .into_par_iter()
        .map(|params| {
            let fold_rmse: Vec<f64> = fold_sets
                .iter()
                .map(|(tr, va)| {
                    fit_family(family, tr, &params)
                        .and_then(|model| crate::models::predict(&model, va))
                        .and_then(|yhat| metrics(&va.y, &yhat))
                        .map_or(f64::INFINITY, |m| m.rmse)
                })
                .collect();
            let mean_rmse = fold_rmse.iter().sum::<f64>() / fold_rmse.len() as f64;
            CombinationScore {
                params,
                fold_rmse,
                mean_rmse,
            }
        })
        .collect();
    let mut best_index = 0;
    for (i, score) in scores.iter().enumerate() {
        if score.mean_rmse < scores[best_index].mean_rmse {
            best_index = i;
        }
    }
    Ok(GridSearchResult {
        family,
        grid: grid.clone(),
        folds,
        best_params: scores[best_index].params.clone(),
        best_mean_rmse: scores[best_index].mean_rmse,
        best_index,
        scores,
        tie_break: "first combination in declared enumeration order",
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub q25: f64,
    pub q75: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Vec<HistogramBin>,
}

/// Residual (y - yhat) summary with an equal-width histogram over
/// [min, max].
pub fn residual_report(y: &[f64], yhat: &[f64], bins: usize) -> Result<ResidualReport> {
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    metrics(y, yhat)?; // shares the shape/finiteness validation
    let residuals: Vec<f64> = y.iter().zip(yhat).map(|(a, p)| a - p).collect();
    let mut sorted = residuals.clone();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for r in &residuals {
        let idx = if width > 0.0 {
            (((r - lo) / width) as usize).min(bins - 1)
        } else {
            0 // degenerate range: everything lands in the first bin
        };
        counts[idx] += 1;
    }
    let histogram = counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lo: lo + i as f64 * width,
            hi: if i == bins - 1 { hi } else { lo + (i + 1) as f64 * width },
            count,
        })
        .collect();
    Ok(ResidualReport {
        mean: mean(&residuals),
        median: quantile_sorted(&sorted, 0.5),
        std: sample_std(&residuals),
        q25: quantile_sorted(&sorted, 0.25),
        q75: quantile_sorted(&sorted, 0.75),
        min: lo,
        max: hi,
        histogram,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRow {
    pub model: String,
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    pub r2: Option<f64>,
}

/// Cross-model comparison, ranked by R2 descending (undefined R2 last).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceMatrix {
    pub rows: Vec<PerformanceRow>,
}

pub fn compare_models(entries: &[(String, MetricsReport)]) -> Result<PerformanceMatrix> {
    if entries.is_empty() {
        return Err(Error::EmptyInput("no models to compare".into()));
    }
    for (i, (name, _)) in entries.iter().enumerate() {
        if entries[..i].iter().any(|(other, _)| other == name) {
            return Err(Error::Config(format!("duplicate model name '{name}'")));
        }
    }
    let mut rows: Vec<PerformanceRow> = entries
        .iter()
        .map(|(name, m)| PerformanceRow {
            model: name.clone(),
            mse: m.mse,
            rmse: m.rmse,
            mae: m.mae,
            r2: m.r2,
        })
        .collect();
    rows.sort_by(|a, b| match (a.r2, b.r2) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    Ok(PerformanceMatrix { rows })
}

impl PerformanceMatrix {
    pub fn rank_of(&self, model: &str) -> Option<usize> {
        self.rows.iter().position(|r| r.model == model).map(|i| i + 1)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| Error::Data(format!("cannot write {}: {e}", path.display())))?;
        w.write_record(["Model", "MSE", "RMSE", "MAE", "R2"])?;
        for r in &self.rows {
            w.write_record([
                r.model.clone(),
                format_metric(r.mse),
                format_metric(r.rmse),
                format_metric(r.mae),
                r.r2.map(format_metric).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<PerformanceMatrix> {
        let mut rdr = csv::Reader::from_path(path)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let cell = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| Error::Data(format!("bad metric cell in {}", path.display())))
            };
            rows.push(PerformanceRow {
                model: rec.get(0).unwrap_or_default().to_string(),
                mse: cell(1)?,
                rmse: cell(2)?,
                mae: cell(3)?,
                r2: rec.get(4).filter(|c| !c.is_empty()).map(|c| c.parse()).transpose()
                    .map_err(|_| Error::Data(format!("bad R2 cell in {}", path.display())))?,
            });
        }
        Ok(PerformanceMatrix { rows })
    }
}

/// Round-trip safe float formatting, matching the table CSV convention.
fn format_metric(x: f64) -> String {
    let short = format!("{x}");
    if short.parse::<f64>() == Ok(x) {
        short
    } else {
        format!("{x:?}")
    }
}
