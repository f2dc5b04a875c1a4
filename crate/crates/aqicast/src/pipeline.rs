//! Declarative end-to-end runs: ingest, AQI, preprocessing, diagnostics,
//! model selection, evaluation, and the cross-model comparison, with every
//! artifact written under one output directory and hashed into a manifest.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::aqi::{compute_aqi, BreakpointTable};
use crate::diagnostics::{describe, pearson_matrix};
use crate::error::{Error, Result};
use crate::evaluate::{
    compare_models, fit_family, grid_search, metrics, residual_report, Grid, MetricsReport,
    ModelFamily,
};
use crate::ingest::{parse_cpcb_csv, profile_missing, SchemaConfig};
use crate::models::{predict, Dataset};
use crate::preprocess::{
    fill_remaining_zero, fit_scaler, impute_group_mean, one_hot, one_hot_apply, outlier_report,
    select_features, time_split, SplitSpec, DEFAULT_DROP,
};
use crate::table::{DataTable, COL_AQI, COL_CITY, COL_STATE};

fn default_encode() -> Vec<String> {
    vec![COL_STATE.to_string(), COL_CITY.to_string()]
}

fn default_folds() -> usize {
    3
}

fn default_seed() -> u64 {
    42
}

/// One run described declaratively. Either `inputs` (raw exports) or
/// `canonical_input` (a table already in canonical CSV form) must be set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub canonical_input: Option<PathBuf>,
    /// header-mapping JSON; bundled CPCB mapping when unset
    #[serde(default)]
    pub schema: Option<PathBuf>,
    /// breakpoint CSV; bundled CPCB table when unset
    #[serde(default)]
    pub breakpoints: Option<PathBuf>,
    /// recompute the AQI column from pollutant sub-indices
    #[serde(default)]
    pub recompute_aqi: bool,
    /// columns to drop before modeling; the meteorological/BTX default when unset
    #[serde(default)]
    pub drop: Option<Vec<String>>,
    #[serde(default = "default_encode")]
    pub encode: Vec<String>,
    pub split_boundary: NaiveDate,
    /// family name -> hyperparameter grid axes
    pub models: IndexMap<String, IndexMap<String, Vec<Value>>>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let config: RunConfig = serde_json::from_str(&text)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() && self.canonical_input.is_none() {
            return Err(Error::Config(
                "config needs either 'inputs' or 'canonical_input'".into(),
            ));
        }
        let mut referenced: Vec<&Path> = self.inputs.iter().map(PathBuf::as_path).collect();
        referenced.extend(self.canonical_input.as_deref());
        referenced.extend(self.schema.as_deref());
        referenced.extend(self.breakpoints.as_deref());
        for path in referenced {
            if !path.exists() {
                return Err(Error::Config(format!(
                    "referenced file does not exist: {}",
                    path.display()
                )));
            }
        }
        if self.models.is_empty() {
            return Err(Error::Config("config lists no model families".into()));
        }
        for family in self.models.keys() {
            family.parse::<ModelFamily>()?;
        }
        if self.folds < 1 {
            return Err(Error::Config("fold count must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Artifact {
    pub name: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub completed_stages: Vec<String>,
    pub artifacts: Vec<Artifact>,
    pub success: bool,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(hex::encode(hasher.finalize()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

struct RunContext {
    out_dir: PathBuf,
    manifest: Manifest,
}

impl RunContext {
    fn new(out_dir: &Path) -> Result<RunContext> {
        std::fs::create_dir_all(out_dir)
            .map_err(|e| Error::io(out_dir.display().to_string(), e))?;
        Ok(RunContext {
            out_dir: out_dir.to_path_buf(),
            manifest: Manifest {
                completed_stages: Vec::new(),
                artifacts: Vec::new(),
                success: false,
            },
        })
    }

    fn register(&mut self, name: &str, file: &str) -> Result<()> {
        let path = self.out_dir.join(file);
        self.manifest.artifacts.push(Artifact {
            name: name.to_string(),
            path: file.to_string(),
            sha256: sha256_file(&path)?,
        });
        Ok(())
    }

    fn add_csv(&mut self, name: &str, file: &str, table: &DataTable) -> Result<()> {
        table.write_csv(&self.out_dir.join(file))?;
        self.register(name, file)
    }

    fn add_json<T: Serialize>(&mut self, name: &str, file: &str, value: &T) -> Result<()> {
        write_json(&self.out_dir.join(file), value)?;
        self.register(name, file)
    }

    fn stage_done(&mut self, stage: &str) {
        self.manifest.completed_stages.push(stage.to_string());
    }

    fn write_manifest(&mut self, success: bool) -> Result<()> {
        self.manifest.success = success;
        write_json(&self.out_dir.join("manifest.json"), &self.manifest)
    }
}

/// Fills the AQI column from pollutant sub-indices; returns
/// (valid rows, invalid rows).
fn recompute_aqi_column(table: &mut DataTable, breakpoints: &BreakpointTable) -> Result<(usize, usize)> {
    let n = table.n_rows();
    let mut values = Vec::with_capacity(n);
    let mut valid = 0;
    for row in 0..n {
        let record = table.record(row);
        let result = compute_aqi(&record, breakpoints)?;
        if result.aqi.is_some() {
            valid += 1;
        }
        values.push(result.aqi);
    }
    if table.has_column(COL_AQI) {
        *table.numeric_mut(COL_AQI)? = values;
    } else {
        table.add_numeric_column(COL_AQI, values)?;
    }
    Ok((valid, n - valid))
}

/// Executes the full pipeline and writes `manifest.json` whether or not a
/// stage fails; partial outputs stay on disk for debugging.
pub fn run_pipeline(config: &RunConfig, out_dir: &Path) -> Result<Manifest> {
    config.validate()?;
    let mut ctx = RunContext::new(out_dir)?;
    let outcome = run_stages(config, &mut ctx);
    ctx.write_manifest(outcome.is_ok())?;
    outcome.map(|()| ctx.manifest)
}

fn run_stages(config: &RunConfig, ctx: &mut RunContext) -> Result<()> {
    // ingest
    let mut table = if !config.inputs.is_empty() {
        let schema = match &config.schema {
            Some(path) => SchemaConfig::from_file(path)?,
            None => SchemaConfig::cpcb_default(),
        };
        let ingested = parse_cpcb_csv(&config.inputs, &schema)?;
        ctx.add_json("ingest report", "ingest_report.json", &ingested.report)?;
        ingested.table
    } else {
        let path = config.canonical_input.as_ref().expect("validated");
        DataTable::read_csv(path)?
    };
    table.sort_by_station_date();
    let missing = profile_missing(&table)?;
    ctx.add_json("missingness profile", "missingness.json", &missing)?;
    ctx.add_csv("canonical table", "01_canonical.csv", &table)?;
    ctx.stage_done("ingest");

    // aqi
    if config.recompute_aqi {
        let breakpoints = match &config.breakpoints {
            Some(path) => BreakpointTable::from_file(path)?,
            None => BreakpointTable::cpcb_default(),
        };
        let (valid, invalid) = recompute_aqi_column(&mut table, &breakpoints)?;
        ctx.add_json(
            "aqi summary",
            "aqi_summary.json",
            &serde_json::json!({ "valid_rows": valid, "invalid_rows": invalid }),
        )?;
    } else if !table.has_column(COL_AQI) {
        return Err(Error::MissingColumn(COL_AQI.to_string()));
    }
    ctx.add_csv("table with AQI", "02_aqi.csv", &table)?;
    ctx.stage_done("aqi");

    // preprocess
    let (imputed, mean_log) = impute_group_mean(&table)?;
    let outliers = outlier_report(&imputed, 1.5)?;
    ctx.add_json("outlier report", "outliers.json", &outliers)?;
    let drop = config
        .drop
        .clone()
        .unwrap_or_else(|| DEFAULT_DROP.iter().map(|s| s.to_string()).collect());
    let (selected, dropped) = select_features(&imputed, &drop)?;
    let (filled, zero_log) = fill_remaining_zero(&selected)?;
    ctx.add_json(
        "imputation log",
        "imputation_log.json",
        &serde_json::json!({
            "group_mean": mean_log,
            "zero_fill": zero_log,
            "dropped_columns": dropped,
        }),
    )?;
    let dates = filled.dates();
    let (start, end) = match (dates.iter().min(), dates.iter().max()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::EmptyInput("no rows survived preprocessing".into())),
    };
    let split_spec = SplitSpec::new(start, config.split_boundary, end)?;
    let (train_raw, test_raw) = time_split(&filled, &split_spec)?;
    let (train_encoded, encoding) = one_hot(&train_raw, &config.encode)?;
    let (test_encoded, _) = one_hot_apply(&encoding, &test_raw)?;
    ctx.add_json("one-hot encoding map", "encoding.json", &encoding)?;
    let scaler = fit_scaler(&train_encoded)?;
    ctx.add_json("scaler parameters", "scaler.json", &scaler)?;
    let train = apply_scaler_stage(&scaler, &train_encoded)?;
    let test = apply_scaler_stage(&scaler, &test_encoded)?;
    ctx.add_csv("train table", "03_train.csv", &train)?;
    ctx.add_csv("test table", "04_test.csv", &test)?;
    ctx.stage_done("preprocess");

    // diagnostics
    let described = describe(&filled)?;
    ctx.add_json("descriptive statistics", "describe.json", &described)?;
    let correlations = pearson_matrix(&filled)?;
    ctx.add_json("correlation matrix", "correlations.json", &correlations)?;
    ctx.stage_done("diagnostics");

    // models: per family, grid search on train, refit best, evaluate on test
    let train_data = Dataset::from_aqi_table(&train)?;
    let test_data = Dataset::from_aqi_table(&test)?;
    let mut comparison: Vec<(String, MetricsReport)> = Vec::new();
    for (family_idx, (family_name, axes)) in config.models.iter().enumerate() {
        let family: ModelFamily = family_name.parse()?;
        let grid = Grid { axes: axes.clone() };
        let search = grid_search(family, &grid, &train, config.folds)?;
        ctx.add_json(
            &format!("{family_name} grid search"),
            &format!("gridsearch_{family_name}.json"),
            &search,
        )?;
        let mut best = search.best_params.clone();
        // named substream: family index offsets the run seed
        if family != ModelFamily::Tree && family != ModelFamily::Svr && !best.contains_key("seed") {
            best.insert("seed".to_string(), Value::from(config.seed + family_idx as u64));
        }
        let model = fit_family(family, &train_data, &best)?;
        let model_file = format!("model_{family_name}.json");
        std::fs::write(ctx.out_dir.join(&model_file), model.to_json()?)
            .map_err(|e| Error::io(model_file.clone(), e))?;
        ctx.register(&format!("{family_name} model"), &model_file)?;
        let yhat = predict(&model, &test_data)?;
        let report = metrics(&test_data.y, &yhat)?;
        ctx.add_json(
            &format!("{family_name} test metrics"),
            &format!("metrics_{family_name}.json"),
            &report,
        )?;
        let residuals = residual_report(&test_data.y, &yhat, 20)?;
        ctx.add_json(
            &format!("{family_name} residuals"),
            &format!("residuals_{family_name}.json"),
            &residuals,
        )?;
        comparison.push((family_name.clone(), report));
    }
    ctx.stage_done("models");

    // compare, with a train-mean baseline row for scale
    let train_mean = train_data.y.iter().sum::<f64>() / train_data.n_rows() as f64;
    let baseline_hat = vec![train_mean; test_data.n_rows()];
    comparison.push(("baseline".to_string(), metrics(&test_data.y, &baseline_hat)?));
    let matrix = compare_models(&comparison)?;
    matrix.write_csv(&ctx.out_dir.join("performance_matrix.csv"))?;
    ctx.register("performance matrix", "performance_matrix.csv")?;
    ctx.add_json("performance matrix (json)", "performance_matrix.json", &matrix)?;
    ctx.stage_done("compare");
    Ok(())
}

fn apply_scaler_stage(
    scaler: &crate::preprocess::ScalerParams,
    table: &DataTable,
) -> Result<DataTable> {
    crate::preprocess::apply_scaler(scaler, table)
}
