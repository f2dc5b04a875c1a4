//! Command-line front end for the aqicast pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use aqicast::aqi::{compute_aqi, BreakpointTable};
use aqicast::diagnostics::{
    acf, adf_test, describe, monthly_heatmap, pacf, pearson_matrix, schwert_max_lag,
    seasonal_decompose,
};
use aqicast::error::{Error, Result};
use aqicast::evaluate::{
    compare_models, fit_family, grid_search, metrics, residual_report, Grid, MetricsReport,
    ModelFamily, ParamMap,
};
use aqicast::ingest::{parse_cpcb_csv, profile_missing, SchemaConfig};
use aqicast::models::{predict, Dataset, ModelArtifact};
use aqicast::pipeline::{run_pipeline, write_json, RunConfig};
use aqicast::preprocess::{
    fill_remaining_zero, fit_scaler, impute_group_mean, one_hot, one_hot_apply, outlier_report,
    select_features, time_split, SplitSpec, DEFAULT_DROP,
};
use aqicast::sarimax::{difference, fit_sarimax, forecast, SarimaSpec};
use aqicast::table::{DataTable, COL_AQI, COL_CITY, COL_DATE, COL_STATE, COL_STATION};

#[derive(Parser)]
#[command(name = "aqicast", version, about = "CPCB air-quality pipeline: ingestion, AQI, diagnostics, models")]
struct Cli {
    /// Worker threads (env: AQICAST_THREADS); defaults to all cores
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse raw CPCB exports into the canonical CSV form
    Ingest(IngestArgs),
    /// Append pollutant sub-indices and the computed AQI
    Aqi(AqiArgs),
    /// Impute, select, split, encode, and scale a canonical table
    Prep(PrepArgs),
    /// Descriptive statistics, correlations, and monthly heat maps
    Eda(EdaArgs),
    /// Time-series diagnostics: ADF, ACF/PACF, seasonal decomposition
    Ts(TsArgs),
    /// Train one model family with explicit parameters
    Fit(FitArgs),
    /// Predict with a saved model
    Predict(PredictArgs),
    /// Fit a seasonal ARIMA for one station and forecast ahead
    Sarimax(SarimaxArgs),
    /// Expanding-window hyperparameter grid search
    Gridsearch(GridsearchArgs),
    /// Score a saved model on a test table
    Evaluate(EvaluateArgs),
    /// Merge metric reports into the performance matrix
    Compare(CompareArgs),
    /// Execute the whole pipeline from a run configuration
    Run(RunArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Raw export CSV paths
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    /// Header-mapping JSON (bundled CPCB mapping when omitted)
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Missingness + per-file report JSON
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct AqiArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Breakpoint CSV (bundled CPCB table when omitted)
    #[arg(long)]
    breakpoints: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PrepArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Drop the meteorological/BTX default column set
    #[arg(long, conflicts_with = "drop")]
    drop_default: bool,
    /// Comma-separated columns to drop
    #[arg(long, value_delimiter = ',')]
    drop: Vec<String>,
    /// Boundary date: rows strictly before it train, the rest test
    #[arg(long)]
    split: NaiveDate,
    /// Comma-separated categorical columns to one-hot encode
    #[arg(long, value_delimiter = ',', default_values_t = [COL_STATE.to_string(), COL_CITY.to_string()])]
    encode: Vec<String>,
    #[arg(long)]
    out_train: PathBuf,
    #[arg(long)]
    out_test: PathBuf,
    /// Imputation/outlier/encoding/scaler log JSON
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct EdaArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    describe: bool,
    #[arg(long)]
    corr: bool,
    /// Group column for per-value monthly AQI heat maps (e.g. State)
    #[arg(long)]
    heatmap: Option<String>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct TsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Restrict to one station before extracting the series
    #[arg(long)]
    station: Option<String>,
    /// Column holding the series
    #[arg(long, default_value = COL_AQI)]
    series: String,
    #[arg(long)]
    adf: bool,
    /// ACF lags to report
    #[arg(long)]
    acf: Option<usize>,
    /// PACF lags to report
    #[arg(long)]
    pacf: Option<usize>,
    /// Seasonal period for classical decomposition
    #[arg(long)]
    decompose: Option<usize>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// tree | forest | boost-level | boost-oblivious | svr
    #[arg(long)]
    model: ModelFamily,
    /// Parameter JSON: inline object or a file path
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    save: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SarimaxArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    station: String,
    /// Trend orders p,d,q
    #[arg(long)]
    order: String,
    /// Seasonal orders P,D,Q,m
    #[arg(long)]
    seasonal: Option<String>,
    /// Comma-separated exogenous columns
    #[arg(long, value_delimiter = ',')]
    exog: Vec<String>,
    /// Forecast horizon in days
    #[arg(long, default_value_t = 0)]
    forecast: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GridsearchArgs {
    #[arg(long)]
    model: ModelFamily,
    /// Grid JSON: inline object or a file path
    #[arg(long)]
    grid: String,
    #[arg(long)]
    train: PathBuf,
    #[arg(long, default_value_t = 3)]
    folds: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Metric report JSON files produced by `evaluate`
    #[arg(long, required = true, num_args = 1..)]
    reports: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("AQICAST_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Aqi(args) => cmd_aqi(args),
        Command::Prep(args) => cmd_prep(args),
        Command::Eda(args) => cmd_eda(args),
        Command::Ts(args) => cmd_ts(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Sarimax(args) => cmd_sarimax(args),
        Command::Gridsearch(args) => cmd_gridsearch(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Run(args) => {
            let config = RunConfig::from_file(&args.config)?;
            run_pipeline(&config, &args.out_dir)?;
            println!("pipeline complete: {}", args.out_dir.display());
            Ok(())
        }
    }
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let schema = match &args.schema {
        Some(path) => SchemaConfig::from_file(path)?,
        None => SchemaConfig::cpcb_default(),
    };
    let mut ingested = parse_cpcb_csv(&args.inputs, &schema)?;
    ingested.table.sort_by_station_date();
    ingested.table.write_csv(&args.out)?;
    if let Some(report_path) = &args.report {
        let missing = profile_missing(&ingested.table)?;
        write_json(
            report_path,
            &json!({ "ingest": ingested.report, "missingness": missing }),
        )?;
    }
    println!(
        "ingested {} rows into {}",
        ingested.table.n_rows(),
        args.out.display()
    );
    Ok(())
}

fn cmd_aqi(args: AqiArgs) -> Result<()> {
    let breakpoints = match &args.breakpoints {
        Some(path) => BreakpointTable::from_file(path)?,
        None => BreakpointTable::cpcb_default(),
    };
    let mut table = DataTable::read_csv(&args.input)?;
    let n = table.n_rows();
    let pollutants: Vec<String> = breakpoints.pollutants().map(str::to_string).collect();
    let mut sub_columns: Vec<Vec<Option<f64>>> = vec![vec![None; n]; pollutants.len()];
    let mut aqi_values = Vec::with_capacity(n);
    let mut invalid = 0usize;
    for row in 0..n {
        let result = compute_aqi(&table.record(row), &breakpoints)?;
        for (k, pollutant) in pollutants.iter().enumerate() {
            sub_columns[k][row] = result.sub_indices.get(pollutant).copied();
        }
        if result.aqi.is_none() {
            invalid += 1;
        }
        aqi_values.push(result.aqi);
    }
    for (pollutant, column) in pollutants.iter().zip(sub_columns) {
        table.add_numeric_column(&format!("SubIndex_{pollutant}"), column)?;
    }
    if table.has_column(COL_AQI) {
        // keep reported values, fill the gaps with computed ones
        let col = table.numeric_mut(COL_AQI)?;
        for (cell, computed) in col.iter_mut().zip(&aqi_values) {
            if cell.is_none() {
                *cell = *computed;
            }
        }
        table.add_numeric_column("AQI_computed", aqi_values)?;
    } else {
        table.add_numeric_column(COL_AQI, aqi_values)?;
    }
    table.write_csv(&args.out)?;
    println!("computed AQI for {n} rows ({invalid} invalid) into {}", args.out.display());
    Ok(())
}

fn cmd_prep(args: PrepArgs) -> Result<()> {
    let table = DataTable::read_csv(&args.input)?;
    let (imputed, mean_log) = impute_group_mean(&table)?;
    let outliers = outlier_report(&imputed, 1.5)?;
    let drop: Vec<String> = if args.drop_default {
        DEFAULT_DROP.iter().map(|s| s.to_string()).collect()
    } else {
        args.drop.clone()
    };
    let (selected, dropped) = select_features(&imputed, &drop)?;
    let (filled, zero_log) = fill_remaining_zero(&selected)?;
    let dates = filled.dates();
    let (start, end) = match (dates.iter().min(), dates.iter().max()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::EmptyInput("table has no rows".into())),
    };
    let spec = SplitSpec::new(start, args.split, end)?;
    let (train_raw, test_raw) = time_split(&filled, &spec)?;
    let (train_encoded, encoding) = one_hot(&train_raw, &args.encode)?;
    let (test_encoded, _) = one_hot_apply(&encoding, &test_raw)?;
    let scaler = fit_scaler(&train_encoded)?;
    let train = aqicast::preprocess::apply_scaler(&scaler, &train_encoded)?;
    let test = aqicast::preprocess::apply_scaler(&scaler, &test_encoded)?;
    train.write_csv(&args.out_train)?;
    test.write_csv(&args.out_test)?;
    if let Some(log_path) = &args.log {
        write_json(
            log_path,
            &json!({
                "group_mean": mean_log,
                "zero_fill": zero_log,
                "outliers": outliers,
                "dropped_columns": dropped,
                "encoding": encoding,
                "scaler": scaler,
            }),
        )?;
    }
    println!(
        "prepared {} train rows, {} test rows",
        train.n_rows(),
        test.n_rows()
    );
    Ok(())
}

fn cmd_eda(args: EdaArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::io(args.out_dir.display().to_string(), e))?;
    let table = DataTable::read_csv(&args.input)?;
    if args.describe {
        write_json(&args.out_dir.join("describe.json"), &describe(&table)?)?;
    }
    if args.corr {
        write_json(&args.out_dir.join("correlations.json"), &pearson_matrix(&table)?)?;
    }
    if let Some(group_column) = &args.heatmap {
        let mut values: Vec<String> = match group_column.as_str() {
            COL_STATION => table.stations().to_vec(),
            _ => table.keys(group_column)?.to_vec(),
        };
        values.sort();
        values.dedup();
        for value in values {
            let heatmap = monthly_heatmap(&table, group_column, &value)?;
            let slug: String = value
                .chars()
                .map(|c| if c.is_alphanumeric() { c } else { '_' })
                .collect();
            write_json(&args.out_dir.join(format!("heatmap_{slug}.json")), &heatmap)?;
        }
    }
    println!("eda reports written to {}", args.out_dir.display());
    Ok(())
}

/// Extracts one date-ordered dense series, optionally for a single station.
fn extract_series(table: &DataTable, station: Option<&str>, column: &str) -> Result<Vec<f64>> {
    let keep: Vec<usize> = match station {
        Some(name) => table
            .stations()
            .iter()
            .enumerate()
            .filter(|(_, s)| s.as_str() == name)
            .map(|(i, _)| i)
            .collect(),
        None => (0..table.n_rows()).collect(),
    };
    if keep.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no rows for station {station:?}"
        )));
    }
    let mut filtered = table.filter_rows(&keep);
    filtered.sort_by_station_date();
    let series: Vec<f64> = filtered
        .numeric(column)?
        .iter()
        .filter_map(|c| *c)
        .collect();
    if series.is_empty() {
        return Err(Error::EmptyInput(format!("column '{column}' has no values")));
    }
    Ok(series)
}

fn cmd_ts(args: TsArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::io(args.out_dir.display().to_string(), e))?;
    let table = DataTable::read_csv(&args.input)?;
    let series = extract_series(&table, args.station.as_deref(), &args.series)?;
    if args.adf {
        let report = adf_test(&series, schwert_max_lag(series.len()))?;
        write_json(&args.out_dir.join("adf.json"), &report)?;
    }
    if let Some(lags) = args.acf {
        write_json(&args.out_dir.join("acf.json"), &acf(&series, lags)?)?;
    }
    if let Some(lags) = args.pacf {
        write_json(&args.out_dir.join("pacf.json"), &pacf(&series, lags)?)?;
    }
    if let Some(period) = args.decompose {
        let parts = seasonal_decompose(&series, period)?;
        write_json(&args.out_dir.join("decomposition.json"), &parts)?;
    }
    println!(
        "time-series diagnostics on {} points written to {}",
        series.len(),
        args.out_dir.display()
    );
    Ok(())
}

/// Accepts either inline JSON or a path to a JSON file.
fn json_argument(text: &str) -> Result<String> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        Ok(trimmed.to_string())
    } else {
        std::fs::read_to_string(trimmed).map_err(|e| Error::io(trimmed.to_string(), e))
    }
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    let params: ParamMap = match &args.params {
        Some(text) => serde_json::from_str(&json_argument(text)?)?,
        None => ParamMap::new(),
    };
    let table = DataTable::read_csv(&args.train)?;
    let data = Dataset::from_aqi_table(&table)?;
    let model = fit_family(args.model, &data, &params)?;
    std::fs::write(&args.save, model.to_json()?)
        .map_err(|e| Error::io(args.save.display().to_string(), e))?;
    println!(
        "trained {} on {} rows, saved to {}",
        args.model,
        data.n_rows(),
        args.save.display()
    );
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.model)
        .map_err(|e| Error::io(args.model.display().to_string(), e))?;
    let model = ModelArtifact::from_json(&text)?;
    let mut table = DataTable::read_csv(&args.input)?;
    let data = Dataset::from_aqi_table(&table)?;
    let yhat = predict(&model, &data)?;
    table.add_numeric_column("Prediction", yhat.into_iter().map(Some).collect())?;
    table.write_csv(&args.out)?;
    println!("predictions written to {}", args.out.display());
    Ok(())
}

fn parse_orders(text: &str, expected: usize, what: &str) -> Result<Vec<usize>> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Config(format!("cannot parse {what} orders from '{text}'")))?;
    if parts.len() != expected {
        return Err(Error::Config(format!(
            "{what} orders need {expected} comma-separated values, got '{text}'"
        )));
    }
    Ok(parts)
}

fn cmd_sarimax(args: SarimaxArgs) -> Result<()> {
    let table = DataTable::read_csv(&args.input)?;
    let keep: Vec<usize> = table
        .stations()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.as_str() == args.station)
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no rows for station '{}'",
            args.station
        )));
    }
    let mut station_table = table.filter_rows(&keep);
    station_table.sort_by_station_date();
    let dense = |column: &str| -> Result<Vec<f64>> {
        station_table
            .numeric(column)?
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    Error::Data(format!("column '{column}' has a hole at row {i}; run prep first"))
                })
            })
            .collect()
    };
    let series = dense(COL_AQI)?;
    let exog: Vec<Vec<f64>> = args
        .exog
        .iter()
        .map(|c| dense(c))
        .collect::<Result<_>>()?;
    let order = parse_orders(&args.order, 3, "trend")?;
    let mut spec = SarimaSpec::new(order[0], order[1], order[2]).with_exog(args.exog.clone());
    if let Some(seasonal) = &args.seasonal {
        let s = parse_orders(seasonal, 4, "seasonal")?;
        spec = spec.seasonal(s[0], s[1], s[2], s[3]);
    }
    let fit = fit_sarimax(&series, &exog, &spec)?;
    if !fit.converged {
        return Err(Error::Convergence(format!(
            "optimizer stopped at {} iterations without meeting tolerances",
            fit.iterations
        )));
    }
    // future exogenous values are unknown; hold each at its last observation
    let exog_future: Vec<Vec<f64>> = exog
        .iter()
        .map(|col| vec![*col.last().unwrap(); args.forecast])
        .collect();
    let fc = forecast(&fit, args.forecast, &exog_future)?;
    let last_date = *station_table.dates().last().unwrap();
    let mut w = csv::Writer::from_path(&args.out)
        .map_err(|e| Error::Data(format!("cannot write {}: {e}", args.out.display())))?;
    w.write_record([COL_DATE, "Forecast", "Lower95", "Upper95"])?;
    for h in 0..args.forecast {
        let date = last_date + chrono::Duration::days(h as i64 + 1);
        w.write_record([
            date.format("%Y-%m-%d").to_string(),
            format!("{}", fc.point[h]),
            format!("{}", fc.lower[h]),
            format!("{}", fc.upper[h]),
        ])?;
    }
    w.flush().map_err(|e| Error::io(args.out.display().to_string(), e))?;
    println!(
        "fit ({} iterations, objective {:.4}); {}-step forecast written to {}",
        fit.iterations,
        fit.objective,
        args.forecast,
        args.out.display()
    );
    // quick stationarity context for order selection
    if order[1] > 0 {
        let diffed = difference(&series, order[1], 0, 1)?;
        println!("differenced series length: {}", diffed.values.len());
    }
    Ok(())
}

fn cmd_gridsearch(args: GridsearchArgs) -> Result<()> {
    let grid = Grid::from_json(&json_argument(&args.grid)?)?;
    let table = DataTable::read_csv(&args.train)?;
    let result = grid_search(args.model, &grid, &table, args.folds)?;
    write_json(&args.out, &result)?;
    println!(
        "searched {} combinations; best mean RMSE {:.4} with {}",
        result.scores.len(),
        result.best_mean_rmse,
        serde_json::to_string(&result.best_params)?
    );
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.model)
        .map_err(|e| Error::io(args.model.display().to_string(), e))?;
    let model = ModelArtifact::from_json(&text)?;
    let table = DataTable::read_csv(&args.test)?;
    let data = Dataset::from_aqi_table(&table)?;
    let yhat = predict(&model, &data)?;
    let report = metrics(&data.y, &yhat)?;
    let residuals = residual_report(&data.y, &yhat, 20)?;
    write_json(
        &args.report,
        &json!({
            "model": model.family(),
            "metrics": report,
            "residuals": residuals,
        }),
    )?;
    println!(
        "evaluated {} on {} rows: rmse {:.4}",
        model.family(),
        data.n_rows(),
        report.rmse
    );
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let mut entries: Vec<(String, MetricsReport)> = Vec::new();
    for path in &args.reports {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let name = value
            .get("model")
            .and_then(|v| v.as_str())
            .ok_or_else(|| Error::Data(format!("{} has no 'model' field", path.display())))?
            .to_string();
        let report: MetricsReport = serde_json::from_value(
            value
                .get("metrics")
                .cloned()
                .ok_or_else(|| Error::Data(format!("{} has no 'metrics' field", path.display())))?,
        )?;
        entries.push((name, report));
    }
    let matrix = compare_models(&entries)?;
    matrix.write_csv(&args.out)?;
    println!("performance matrix written to {}", args.out.display());
    Ok(())
}
