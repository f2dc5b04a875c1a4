//! End-to-end tests driving the compiled binary through every subcommand.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aqicast::synth::{punch_holes, synthetic_table};
use aqicast::table::DataTable;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aqicast"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_expect_code(args: &[&str], code: i32) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(code),
        "command {:?}\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(path: &Path) -> String {
    path.display().to_string()
}

/// A small raw export in the vendor header dialect, including missing-value
/// sentinels, a negative reading, and one unparseable date.
const RAW_EXPORT: &str = "\
State,City,Station,Date,PM2.5 (ug/m3),PM10 (ug/m3),NO2 (ug/m3),CO (mg/m3),SO2 (ug/m3),NH3 (ug/m3),AQI
Delhi,Delhi,Anand Vihar,01-01-2020,92.5,180.0,41.0,1.2,12.0,30.0,287
Delhi,Delhi,Anand Vihar,02-01-2020,NA,210.0,44.0,1.5,14.0,28.0,
Delhi,Delhi,Anand Vihar,03-01-2020,60.0,-5.0,39.0,0.9,11.0,25.0,190
Punjab,Amritsar,Golden Temple,01-01-2020,35.0,80.0,20.0,0.6,8.0,15.0,102
Punjab,Amritsar,Golden Temple,not-a-date,40.0,90.0,22.0,0.7,9.0,16.0,110
Haryana,Gurugram,Vikas Sadan,01-01-2020,55.0,120.0,30.0,1.0,10.0,20.0,160
";

fn write_raw_export(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("raw.csv");
    std::fs::write(&path, RAW_EXPORT).unwrap();
    path
}

fn write_synth(dir: &TempDir, name: &str, n_rows: usize, seed: u64) -> PathBuf {
    let path = dir.path().join(name);
    synthetic_table(n_rows, seed).write_csv(&path).unwrap();
    path
}

#[test]
fn ingest_round_trip() {
    let dir = TempDir::new().unwrap();
    let raw = write_raw_export(&dir);
    let out = dir.path().join("canonical.csv");
    let report = dir.path().join("ingest.json");
    run_ok(&[
        "ingest",
        "--in",
        &s(&raw),
        "--out",
        &s(&out),
        "--report",
        &s(&report),
    ]);

    let table = DataTable::read_csv(&out).unwrap();
    // the bad-date row is rejected, everything else survives
    assert_eq!(table.n_rows(), 5);
    // sentinel and negative readings become holes
    assert!(table.numeric("PM2.5").unwrap().iter().any(Option::is_none));
    assert!(table.numeric("PM10").unwrap().iter().any(Option::is_none));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report["ingest"]["files"][0]["rejected_bad_date"], 1);
    assert!(report["missingness"]["per_column"].as_array().unwrap().len() > 1);
}

#[test]
fn ingest_without_station_column_exits_2() {
    let dir = TempDir::new().unwrap();
    let raw = dir.path().join("headless.csv");
    std::fs::write(
        &raw,
        "State,City,Date,PM2.5\nDelhi,Delhi,01-01-2020,90.0\n",
    )
    .unwrap();
    let out = dir.path().join("canonical.csv");
    run_expect_code(&["ingest", "--in", &s(&raw), "--out", &s(&out)], 2);
}

#[test]
fn missing_input_file_exits_3() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("canonical.csv");
    run_expect_code(
        &["ingest", "--in", "/nonexistent/raw.csv", "--out", &s(&out)],
        3,
    );
}

#[test]
fn aqi_appends_sub_indices_and_fills_gaps() {
    let dir = TempDir::new().unwrap();
    let raw = write_raw_export(&dir);
    let canonical = dir.path().join("canonical.csv");
    run_ok(&["ingest", "--in", &s(&raw), "--out", &s(&canonical)]);
    let with_aqi = dir.path().join("with_aqi.csv");
    run_ok(&["aqi", "--in", &s(&canonical), "--out", &s(&with_aqi)]);

    let table = DataTable::read_csv(&with_aqi).unwrap();
    assert!(table.has_column("SubIndex_PM2.5"));
    assert!(table.has_column("SubIndex_CO"));
    // reported AQI kept, computed values appended alongside
    assert!(table.has_column("AQI_computed"));
    // the row whose reported AQI was blank got the computed value filled in
    assert!(table.numeric("AQI").unwrap().iter().all(Option::is_some));
}

#[test]
fn prep_splits_encodes_and_scales() {
    let dir = TempDir::new().unwrap();
    let mut table = synthetic_table(400, 11);
    punch_holes(&mut table, 0.05, 12);
    let input = dir.path().join("synth.csv");
    table.write_csv(&input).unwrap();
    let train = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    let log = dir.path().join("prep.json");
    run_ok(&[
        "prep",
        "--in",
        &s(&input),
        "--split",
        "2019-03-01",
        "--out-train",
        &s(&train),
        "--out-test",
        &s(&test),
        "--log",
        &s(&log),
    ]);

    let train = DataTable::read_csv(&train).unwrap();
    let test = DataTable::read_csv(&test).unwrap();
    assert_eq!(train.n_rows() + test.n_rows(), 400);
    assert!(train.n_rows() > 0 && test.n_rows() > 0);
    // one-hot columns from the default State/City encoding
    assert!(train.has_column("State=Delhi"));
    assert!(test.has_column("State=Delhi"));
    // imputation + zero fill leave no holes in the features
    assert!(train.numeric("PM2.5").unwrap().iter().all(Option::is_some));

    let log: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&log).unwrap()).unwrap();
    for key in ["group_mean", "zero_fill", "outliers", "encoding", "scaler"] {
        assert!(log.get(key).is_some(), "log is missing '{key}'");
    }
}

#[test]
fn fit_predict_evaluate_compare_round_trip() {
    let dir = TempDir::new().unwrap();
    let train = write_synth(&dir, "train.csv", 400, 21);
    let test = write_synth(&dir, "test.csv", 120, 22);

    let tree = dir.path().join("tree.json");
    run_ok(&[
        "fit",
        "--model",
        "tree",
        "--params",
        r#"{"max_depth": 8}"#,
        "--train",
        &s(&train),
        "--save",
        &s(&tree),
    ]);
    let forest = dir.path().join("forest.json");
    run_ok(&[
        "fit",
        "--model",
        "forest",
        "--params",
        r#"{"n_estimators": 20, "max_depth": 10}"#,
        "--train",
        &s(&train),
        "--save",
        &s(&forest),
    ]);

    let predictions = dir.path().join("predictions.csv");
    run_ok(&[
        "predict",
        "--model",
        &s(&tree),
        "--in",
        &s(&test),
        "--out",
        &s(&predictions),
    ]);
    let predicted = DataTable::read_csv(&predictions).unwrap();
    assert_eq!(predicted.n_rows(), 120);
    assert!(predicted.numeric("Prediction").unwrap().iter().all(Option::is_some));

    let tree_report = dir.path().join("tree_report.json");
    let forest_report = dir.path().join("forest_report.json");
    run_ok(&["evaluate", "--model", &s(&tree), "--test", &s(&test), "--report", &s(&tree_report)]);
    run_ok(&["evaluate", "--model", &s(&forest), "--test", &s(&test), "--report", &s(&forest_report)]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&tree_report).unwrap()).unwrap();
    assert_eq!(report["model"], "tree");
    assert!(report["metrics"]["rmse"].as_f64().unwrap() > 0.0);
    assert!(report["residuals"]["histogram"].is_array());

    let matrix = dir.path().join("performance_matrix.csv");
    run_ok(&[
        "compare",
        "--reports",
        &s(&tree_report),
        &s(&forest_report),
        "--out",
        &s(&matrix),
    ]);
    let text = std::fs::read_to_string(&matrix).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "header plus one line per model:\n{text}");
    assert!(lines[0].starts_with("Model,"));
}

#[test]
fn fit_with_unknown_parameter_exits_2() {
    let dir = TempDir::new().unwrap();
    let train = write_synth(&dir, "train.csv", 100, 31);
    let save = dir.path().join("model.json");
    run_expect_code(
        &[
            "fit",
            "--model",
            "tree",
            "--params",
            r#"{"bogus_knob": 1}"#,
            "--train",
            &s(&train),
            "--save",
            &s(&save),
        ],
        2,
    );
}

#[test]
fn predict_with_mismatched_schema_exits_2() {
    let dir = TempDir::new().unwrap();
    let train = write_synth(&dir, "train.csv", 100, 41);
    let model = dir.path().join("model.json");
    run_ok(&[
        "fit", "--model", "tree", "--train", &s(&train), "--save", &s(&model),
    ]);
    // drop a feature column so the saved schema no longer matches
    let mut crippled = synthetic_table(50, 42);
    assert!(crippled.drop_column("SO2"));
    let test = dir.path().join("narrow.csv");
    crippled.write_csv(&test).unwrap();
    let out = dir.path().join("predictions.csv");
    run_expect_code(
        &["predict", "--model", &s(&model), "--in", &s(&test), "--out", &s(&out)],
        2,
    );
}

#[test]
fn gridsearch_reports_scores_in_declared_order() {
    let dir = TempDir::new().unwrap();
    let train = write_synth(&dir, "train.csv", 240, 51);
    let out = dir.path().join("grid.json");
    run_ok(&[
        "gridsearch",
        "--model",
        "tree",
        "--grid",
        r#"{"max_depth": [3, 8], "min_samples_leaf": [2, 5]}"#,
        "--train",
        &s(&train),
        "--folds",
        "2",
        "--out",
        &s(&out),
    ]);
    let result: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let scores = result["scores"].as_array().unwrap();
    assert_eq!(scores.len(), 4);
    // last declared axis varies fastest
    assert_eq!(scores[0]["params"]["max_depth"], 3);
    assert_eq!(scores[0]["params"]["min_samples_leaf"], 2);
    assert_eq!(scores[1]["params"]["max_depth"], 3);
    assert_eq!(scores[1]["params"]["min_samples_leaf"], 5);
    assert!(result["best_mean_rmse"].as_f64().unwrap().is_finite());
    assert!(result["best_params"].is_object());
}

#[test]
fn sarimax_writes_a_forecast_table() {
    let dir = TempDir::new().unwrap();
    let input = write_synth(&dir, "series.csv", 240, 61);
    let out = dir.path().join("forecast.csv");
    run_ok(&[
        "sarimax",
        "--in",
        &s(&input),
        "--station",
        "Anand Vihar",
        "--order",
        "1,0,0",
        "--forecast",
        "5",
        "--out",
        &s(&out),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "Date,Forecast,Lower95,Upper95");
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        let lower: f64 = fields[2].parse().unwrap();
        let point: f64 = fields[1].parse().unwrap();
        let upper: f64 = fields[3].parse().unwrap();
        assert!(lower <= point && point <= upper);
    }
}

#[test]
fn sarimax_unknown_station_exits_3() {
    let dir = TempDir::new().unwrap();
    let input = write_synth(&dir, "series.csv", 100, 62);
    let out = dir.path().join("forecast.csv");
    run_expect_code(
        &[
            "sarimax",
            "--in",
            &s(&input),
            "--station",
            "Nowhere",
            "--order",
            "1,0,0",
            "--out",
            &s(&out),
        ],
        3,
    );
}

#[test]
fn eda_and_ts_write_reports() {
    let dir = TempDir::new().unwrap();
    let input = write_synth(&dir, "synth.csv", 300, 71);
    let eda_dir = dir.path().join("eda");
    run_ok(&[
        "eda",
        "--in",
        &s(&input),
        "--describe",
        "--corr",
        "--heatmap",
        "State",
        "--out-dir",
        &s(&eda_dir),
    ]);
    assert!(eda_dir.join("describe.json").exists());
    assert!(eda_dir.join("correlations.json").exists());
    assert!(eda_dir.join("heatmap_Delhi.json").exists());

    let ts_dir = dir.path().join("ts");
    run_ok(&[
        "ts",
        "--in",
        &s(&input),
        "--station",
        "Anand Vihar",
        "--adf",
        "--acf",
        "10",
        "--pacf",
        "10",
        "--decompose",
        "7",
        "--out-dir",
        &s(&ts_dir),
    ]);
    for file in ["adf.json", "acf.json", "pacf.json", "decomposition.json"] {
        assert!(ts_dir.join(file).exists(), "missing {file}");
    }
    let acf: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(ts_dir.join("acf.json")).unwrap()).unwrap();
    assert_eq!(acf.as_array().unwrap().len(), 11); // lag 0 through 10
}

#[test]
fn run_executes_the_whole_pipeline() {
    let dir = TempDir::new().unwrap();
    let mut table = synthetic_table(400, 81);
    punch_holes(&mut table, 0.05, 82);
    let input = dir.path().join("canonical.csv");
    table.write_csv(&input).unwrap();
    let config_path = dir.path().join("run.json");
    let config = serde_json::json!({
        "canonical_input": input,
        "split_boundary": "2019-03-01",
        "folds": 1,
        "models": {
            "tree": { "max_depth": [8] },
            "forest": { "n_estimators": [20], "max_depth": [10] }
        }
    });
    std::fs::write(&config_path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    let out_dir = dir.path().join("out");
    run_ok(&["run", "--config", &s(&config_path), "--out-dir", &s(&out_dir)]);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["success"], true);
    for artifact in ["performance_matrix.csv", "model_tree.json", "metrics_forest.json"] {
        assert!(out_dir.join(artifact).exists(), "missing {artifact}");
    }
    // every artifact hash in the manifest matches a file on disk
    assert!(!manifest["artifacts"].as_array().unwrap().is_empty());
}

#[test]
fn run_with_invalid_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let config_path = dir.path().join("run.json");
    std::fs::write(
        &config_path,
        r#"{ "split_boundary": "2019-03-01", "models": {} }"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    run_expect_code(
        &["run", "--config", &s(&config_path), "--out-dir", &s(&out_dir)],
        2,
    );
}

#[test]
fn threads_flag_and_env_are_accepted() {
    let dir = TempDir::new().unwrap();
    let input = write_synth(&dir, "synth.csv", 100, 91);
    let eda_dir = dir.path().join("eda");
    run_ok(&[
        "--threads",
        "2",
        "eda",
        "--in",
        &s(&input),
        "--describe",
        "--out-dir",
        &s(&eda_dir),
    ]);

    let eda_dir2 = dir.path().join("eda2");
    let out = bin()
        .env("AQICAST_THREADS", "2")
        .args(["eda", "--in", &s(&input), "--describe", "--out-dir", &s(&eda_dir2)])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
}
