//! Cleaning pipeline: group-mean imputation, zero fallback, feature
//! selection, IQR outlier flagging, one-hot encoding, standard scaling and
//! the date-based train/test split.
//!
//! Stages must run in order: group-mean → select → zero-fill → split →
//! encode (fit on train) → scale (fit on train). Out-of-order calls are
//! rejected with a pipeline-order error.

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;
use crate::table::{ColumnKind, DataTable, SplitSide, Stage, COL_AQI};

/// Default drop list: meteorological factors, volatile organics and Ozone.
pub const DEFAULT_DROP: [&str; 9] = [
    "Temp", "RH", "WS", "WD", "SR", "Benzene", "Toluene", "Xylene", "Ozone",
];

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ImputationEntry {
    pub station: String,
    pub year: i32,
    pub month: u32,
    pub column: String,
    pub mean_fills: usize,
    pub zero_fills: usize,
    pub group_mean: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ImputationLog {
    pub entries: Vec<ImputationEntry>,
    pub warnings: Vec<String>,
}

impl ImputationLog {
    pub fn total_mean_fills(&self) -> usize {
        self.entries.iter().map(|e| e.mean_fills).sum()
    }

    pub fn total_zero_fills(&self) -> usize {
        self.entries.iter().map(|e| e.zero_fills).sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnOutliers {
    pub column: String,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
    pub flagged_rows: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutlierReport {
    pub k: f64,
    pub columns: Vec<ColumnOutliers>,
    pub insufficient_columns: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncodingMap {
    /// source column → lexicographically ordered categories
    pub categories: BTreeMap<String, Vec<String>>,
}

impl EncodingMap {
    pub fn output_columns(&self, source: &str) -> Vec<String> {
        self.categories
            .get(source)
            .map(|cats| cats.iter().map(|c| format!("{source}={c}")).collect())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureScale {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalerParams {
    /// per scaled feature, in column order
    pub features: BTreeMap<String, FeatureScale>,
    /// constant features passed through unscaled
    pub constant: Vec<String>,
    pub fitted_on: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_start: NaiveDate,
    pub boundary: NaiveDate,
    pub test_end: NaiveDate,
}

impl SplitSpec {
    pub fn new(train_start: NaiveDate, boundary: NaiveDate, test_end: NaiveDate) -> Result<Self> {
        if !(train_start < boundary && boundary <= test_end) {
            return Err(Error::Config(format!(
                "split spec must satisfy train_start < boundary <= test_end, got {train_start} / {boundary} / {test_end}"
            )));
        }
        Ok(SplitSpec {
            train_start,
            boundary,
            test_end,
        })
    }
}

fn require_stage(table: &DataTable, allowed: &[Stage], op: &str) -> Result<()> {
    if allowed.contains(&table.stage()) {
        Ok(())
    } else {
        Err(Error::PipelineOrder(format!(
            "{op} cannot run at stage {:?}",
            table.stage()
        )))
    }
}

fn group_key(table: &DataTable, row: usize) -> (String, i32, u32) {
    let d = table.dates()[row];
    (table.stations()[row].clone(), d.year(), d.month())
}

/// Fills each missing numeric cell with the mean of the present values in
/// its (station, year, month) group. Groups with no present value stay
/// missing for the zero-fill pass.
pub fn impute_group_mean(table: &DataTable) -> Result<(DataTable, ImputationLog)> {
    require_stage(table, &[Stage::Raw, Stage::MeanImputed], "impute_group_mean")?;
    let mut out = table.clone();
    let mut log = ImputationLog::default();
    let n = table.n_rows();
    for column in table.numeric_column_names() {
        let mut groups: BTreeMap<(String, i32, u32), (Vec<usize>, Vec<f64>)> = BTreeMap::new();
        let cells = table.numeric(&column)?;
        for row in 0..n {
            let key = group_key(table, row);
            let entry = groups.entry(key).or_default();
            match cells[row] {
                Some(v) => entry.1.push(v),
                None => entry.0.push(row),
            }
        }
        let out_cells = out.numeric_mut(&column)?;
        for ((station, year, month), (missing_rows, present)) in groups {
            if missing_rows.is_empty() {
                continue;
            }
            let group_mean = if present.is_empty() {
                None
            } else {
                Some(stats::mean(&present))
            };
            let mut mean_fills = 0;
            if let Some(m) = group_mean {
                for &row in &missing_rows {
                    out_cells[row] = Some(m);
                    mean_fills += 1;
                }
            }
            log.entries.push(ImputationEntry {
                station,
                year,
                month,
                column: column.clone(),
                mean_fills,
                zero_fills: 0,
                group_mean,
            });
        }
    }
    out.set_stage(Stage::MeanImputed);
    Ok((out, log))
}

/// Drops the listed columns; absent names produce warnings, dropping the
/// target is a configuration error.
pub fn select_features(table: &DataTable, drop: &[String]) -> Result<(DataTable, Vec<String>)> {
    require_stage(table, &[Stage::MeanImputed, Stage::Selected], "select_features")?;
    if drop.iter().any(|c| c == COL_AQI) {
        return Err(Error::Config(format!("cannot drop the target column '{COL_AQI}'")));
    }
    let mut out = table.clone();
    let mut warnings = Vec::new();
    for name in drop {
        if !out.drop_column(name) {
            warnings.push(format!("drop list names absent column '{name}'"));
        }
    }
    out.set_stage(Stage::Selected);
    Ok((out, warnings))
}

/// Replaces every still-missing numeric cell with 0.0.
pub fn fill_remaining_zero(table: &DataTable) -> Result<(DataTable, ImputationLog)> {
    require_stage(table, &[Stage::Selected, Stage::ZeroFilled], "fill_remaining_zero")?;
    let mut out = table.clone();
    let mut log = ImputationLog::default();
    let n = table.n_rows();
    for column in table.numeric_column_names() {
        let mut groups: BTreeMap<(String, i32, u32), (usize, usize)> = BTreeMap::new();
        let cells = out.numeric_mut(&column)?;
        for row in 0..n {
            let d = table.dates()[row];
            let key = (table.stations()[row].clone(), d.year(), d.month());
            let entry = groups.entry(key).or_default();
            entry.1 += 1;
            if cells[row].is_none() {
                cells[row] = Some(0.0);
                entry.0 += 1;
            }
        }
        for ((station, year, month), (zeroed, total)) in groups {
            if zeroed == 0 {
                continue;
            }
            if zeroed == total {
                log.warnings.push(format!(
                    "station '{station}' {year}-{month:02} column '{column}' was fully zero-filled"
                ));
            }
            log.entries.push(ImputationEntry {
                station,
                year,
                month,
                column: column.clone(),
                mean_fills: 0,
                zero_fills: zeroed,
                group_mean: None,
            });
        }
    }
    out.set_stage(Stage::ZeroFilled);
    Ok((out, log))
}

/// IQR fence report; flag-only, the table is never modified.
pub fn outlier_report(table: &DataTable, k: f64) -> Result<OutlierReport> {
    let mut report = OutlierReport {
        k,
        columns: Vec::new(),
        insufficient_columns: Vec::new(),
    };
    for column in table.numeric_column_names() {
        let cells = table.numeric(&column)?;
        let mut present: Vec<(usize, f64)> = cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|v| (i, v)))
            .collect();
        if present.len() < 4 {
            report.insufficient_columns.push(column);
            continue;
        }
        let mut sorted: Vec<f64> = present.iter().map(|&(_, v)| v).collect();
        sorted.sort_by(f64::total_cmp);
        let q1 = stats::quantile_sorted(&sorted, 0.25);
        let q3 = stats::quantile_sorted(&sorted, 0.75);
        let iqr = q3 - q1;
        let lower_fence = q1 - k * iqr;
        let upper_fence = q3 + k * iqr;
        present.retain(|&(_, v)| v < lower_fence || v > upper_fence);
        report.columns.push(ColumnOutliers {
            column,
            q1,
            q3,
            iqr,
            lower_fence,
            upper_fence,
            flagged_rows: present.into_iter().map(|(i, _)| i).collect(),
        });
    }
    Ok(report)
}

/// Date-based split: train = [train_start, boundary), test = [boundary, test_end].
pub fn time_split(table: &DataTable, spec: &SplitSpec) -> Result<(DataTable, DataTable)> {
    require_stage(table, &[Stage::ZeroFilled], "time_split")?;
    let dates = table.dates();
    let train_rows: Vec<usize> = (0..table.n_rows())
        .filter(|&i| dates[i] >= spec.train_start && dates[i] < spec.boundary)
        .collect();
    let test_rows: Vec<usize> = (0..table.n_rows())
        .filter(|&i| dates[i] >= spec.boundary && dates[i] <= spec.test_end)
        .collect();
    if train_rows.is_empty() {
        return Err(Error::EmptySplit("train"));
    }
    if test_rows.is_empty() {
        return Err(Error::EmptySplit("test"));
    }
    let mut train = table.filter_rows(&train_rows);
    let mut test = table.filter_rows(&test_rows);
    train.set_split_side(Some(SplitSide::Train));
    test.set_split_side(Some(SplitSide::Test));
    Ok((train, test))
}

/// Fits the one-hot encoding on a train table and applies it.
pub fn one_hot(table: &DataTable, columns: &[String]) -> Result<(DataTable, EncodingMap)> {
    require_stage(table, &[Stage::ZeroFilled], "one_hot")?;
    if table.split_side() != Some(SplitSide::Train) {
        return Err(Error::PipelineOrder(
            "one-hot encoding must be fitted on the train split".into(),
        ));
    }
    let mut categories = BTreeMap::new();
    for column in columns {
        match table.column_kind(column) {
            Some(ColumnKind::Key) => {}
            Some(_) => {
                return Err(Error::SchemaMismatch(format!(
                    "cannot one-hot encode non-key column '{column}'"
                )))
            }
            None => return Err(Error::MissingColumn(column.clone())),
        }
        let mut cats: Vec<String> = table.keys(column)?.to_vec();
        cats.sort();
        cats.dedup();
        categories.insert(column.clone(), cats);
    }
    let map = EncodingMap { categories };
    let encoded = one_hot_apply(&map, table)?.0;
    Ok((encoded, map))
}

/// Applies a fitted encoding; unseen categories become all-zero rows and a
/// warning per occurrence count.
pub fn one_hot_apply(map: &EncodingMap, table: &DataTable) -> Result<(DataTable, Vec<String>)> {
    require_stage(table, &[Stage::ZeroFilled], "one_hot_apply")?;
    let mut out = table.clone();
    let mut warnings = Vec::new();
    for (column, cats) in &map.categories {
        let values = table.keys(column)?.to_vec();
        let mut unseen = 0usize;
        for cat in cats {
            let cells: Vec<Option<f64>> = values
                .iter()
                .map(|v| Some(if v == cat { 1.0 } else { 0.0 }))
                .collect();
            out.add_numeric_column(&format!("{column}={cat}"), cells)?;
        }
        for v in &values {
            if !cats.contains(v) {
                unseen += 1;
            }
        }
        if unseen > 0 {
            warnings.push(format!(
                "column '{column}': {unseen} rows carry categories unseen at fit time"
            ));
        }
    }
    out.set_stage(Stage::Encoded);
    Ok((out, warnings))
}

fn is_one_hot_column(name: &str) -> bool {
    name.contains('=')
}

/// Fits standard-scaling parameters on the train split only.
pub fn fit_scaler(train: &DataTable) -> Result<ScalerParams> {
    require_stage(train, &[Stage::Encoded], "fit_scaler")?;
    if train.split_side() != Some(SplitSide::Train) {
        return Err(Error::PipelineOrder(
            "scaler must be fitted on the train split".into(),
        ));
    }
    let mut features = BTreeMap::new();
    let mut constant = Vec::new();
    for column in train.numeric_column_names() {
        if column == COL_AQI || is_one_hot_column(&column) {
            continue;
        }
        let values: Vec<f64> = train.numeric(&column)?.iter().map(|c| c.unwrap_or(0.0)).collect();
        let mean = stats::mean(&values);
        let std = stats::population_std(&values);
        if std > 0.0 {
            features.insert(column, FeatureScale { mean, std });
        } else {
            constant.push(column);
        }
    }
    Ok(ScalerParams {
        features,
        constant,
        fitted_on: "train".into(),
    })
}

/// Applies train-fitted scaling: (x − mean)/std per scaled feature.
pub fn apply_scaler(params: &ScalerParams, table: &DataTable) -> Result<DataTable> {
    require_stage(table, &[Stage::Encoded], "apply_scaler")?;
    let mut out = table.clone();
    for (column, scale) in &params.features {
        let cells = out.numeric_mut(column)?;
        for cell in cells.iter_mut() {
            if let Some(v) = cell {
                *v = (*v - scale.mean) / scale.std;
            }
        }
    }
    out.set_stage(Stage::Scaled);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::StationDayRecord;
    use approx::assert_abs_diff_eq;
    use indexmap::IndexMap;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn table_with(values: &[(&str, NaiveDate, Option<f64>)]) -> DataTable {
        let mut t = DataTable::new(&["X", COL_AQI]);
        for (station, date, v) in values {
            let mut readings = IndexMap::new();
            readings.insert("X".to_string(), *v);
            t.push_record(StationDayRecord {
                state: "Delhi".into(),
                city: "Delhi".into(),
                station: station.to_string(),
                date: *date,
                readings,
                aqi: Some(1.0),
            })
            .unwrap();
        }
        t.sort_by_station_date();
        t
    }

    #[test]
    fn group_mean_fills_from_present_values() {
        let t = table_with(&[
            ("A", d(2019, 1, 1), Some(10.0)),
            ("A", d(2019, 1, 2), None),
            ("A", d(2019, 1, 3), Some(20.0)),
        ]);
        let (out, log) = impute_group_mean(&t).unwrap();
        assert_eq!(out.numeric("X").unwrap()[1], Some(15.0));
        assert_eq!(log.total_mean_fills(), 1);
        let entry = log.entries.iter().find(|e| e.column == "X").unwrap();
        assert_eq!(entry.group_mean, Some(15.0));
    }

    #[test]
    fn fully_missing_group_stays_missing_until_zero_fill() {
        let t = table_with(&[
            ("A", d(2019, 1, 1), None),
            ("A", d(2019, 1, 2), None),
            ("A", d(2019, 2, 1), Some(4.0)),
        ]);
        let (out, log) = impute_group_mean(&t).unwrap();
        assert_eq!(out.numeric("X").unwrap()[0], None);
        let jan = log
            .entries
            .iter()
            .find(|e| e.column == "X" && e.month == 1)
            .unwrap();
        assert_eq!(jan.mean_fills, 0);
        let (selected, _) = select_features(&out, &[]).unwrap();
        let (filled, zlog) = fill_remaining_zero(&selected).unwrap();
        assert_eq!(filled.numeric("X").unwrap()[0], Some(0.0));
        assert_eq!(zlog.total_zero_fills(), 2);
        assert!(zlog.warnings.iter().any(|w| w.contains("fully zero-filled")));
    }

    #[test]
    fn imputation_is_idempotent() {
        let t = table_with(&[
            ("A", d(2019, 1, 1), Some(10.0)),
            ("A", d(2019, 1, 2), None),
            ("B", d(2019, 1, 1), None),
        ]);
        let (once, _) = impute_group_mean(&t).unwrap();
        let (twice, log2) = impute_group_mean(&once).unwrap();
        assert_eq!(once, twice);
        assert_eq!(log2.total_mean_fills(), 0);
    }

    #[test]
    fn out_of_order_calls_are_rejected() {
        let t = table_with(&[("A", d(2019, 1, 1), Some(1.0)), ("A", d(2019, 1, 2), Some(2.0))]);
        assert!(matches!(
            fill_remaining_zero(&t),
            Err(Error::PipelineOrder(_))
        ));
        assert!(matches!(select_features(&t, &[]), Err(Error::PipelineOrder(_))));
        assert!(matches!(fit_scaler(&t), Err(Error::PipelineOrder(_))));
    }

    #[test]
    fn select_drops_and_warns() {
        let t = table_with(&[("A", d(2019, 1, 1), Some(1.0))]);
        let (t, _) = impute_group_mean(&t).unwrap();
        let (out, warnings) = select_features(&t, &["X".into(), "Nope".into()]).unwrap();
        assert!(!out.has_column("X"));
        assert_eq!(warnings.len(), 1);
        assert!(matches!(
            select_features(&t, &[COL_AQI.to_string()]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn outlier_fences_match_hand_computation() {
        let values: Vec<_> = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 100.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| ("A", d(2019, 1, i as u32 + 1), Some(v)))
            .collect();
        let t = table_with(&values);
        let report = outlier_report(&t, 1.5).unwrap();
        let x = report.columns.iter().find(|c| c.column == "X").unwrap();
        assert_abs_diff_eq!(x.q1, 2.75, epsilon = 1e-12);
        assert_abs_diff_eq!(x.q3, 6.25, epsilon = 1e-12);
        assert_abs_diff_eq!(x.lower_fence, -2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(x.upper_fence, 11.5, epsilon = 1e-12);
        assert_eq!(x.flagged_rows.len(), 1);
        assert_eq!(t.numeric("X").unwrap()[x.flagged_rows[0]], Some(100.0));
    }

    #[test]
    fn constant_column_flags_nothing() {
        let values: Vec<_> = (1..=5)
            .map(|i| ("A", d(2019, 1, i), Some(5.0)))
            .collect();
        let t = table_with(&values);
        let report = outlier_report(&t, 1.5).unwrap();
        let x = report.columns.iter().find(|c| c.column == "X").unwrap();
        assert_eq!(x.iqr, 0.0);
        assert!(x.flagged_rows.is_empty());
    }

    #[test]
    fn short_column_reported_insufficient() {
        let t = table_with(&[("A", d(2019, 1, 1), Some(1.0))]);
        let report = outlier_report(&t, 1.5).unwrap();
        assert!(report.insufficient_columns.contains(&"X".to_string()));
    }

    fn pipeline_to_split(values: &[(&str, NaiveDate, Option<f64>)]) -> DataTable {
        let t = table_with(values);
        let (t, _) = impute_group_mean(&t).unwrap();
        let (t, _) = select_features(&t, &[]).unwrap();
        let (t, _) = fill_remaining_zero(&t).unwrap();
        t
    }

    #[test]
    fn split_boundary_row_lands_in_test() {
        let t = pipeline_to_split(&[
            ("A", d(2022, 9, 29), Some(1.0)),
            ("A", d(2022, 9, 30), Some(2.0)),
            ("A", d(2022, 10, 1), Some(3.0)),
            ("A", d(2022, 10, 2), Some(4.0)),
        ]);
        let spec = SplitSpec::new(d(2019, 1, 1), d(2022, 10, 1), d(2023, 10, 15)).unwrap();
        let (train, test) = time_split(&t, &spec).unwrap();
        assert_eq!(train.n_rows(), 2);
        assert_eq!(test.n_rows(), 2);
        assert_eq!(test.dates()[0], d(2022, 10, 1));
    }

    #[test]
    fn split_with_no_train_rows_errors() {
        let t = pipeline_to_split(&[("A", d(2023, 1, 1), Some(1.0))]);
        let spec = SplitSpec::new(d(2019, 1, 1), d(2022, 10, 1), d(2023, 10, 15)).unwrap();
        assert!(matches!(time_split(&t, &spec), Err(Error::EmptySplit("train"))));
    }

    fn multi_state_table() -> DataTable {
        let mut t = DataTable::new(&["X", COL_AQI]);
        for (i, state) in ["Delhi", "Haryana", "Punjab", "Delhi"].iter().enumerate() {
            let mut readings = IndexMap::new();
            readings.insert("X".to_string(), Some(i as f64));
            t.push_record(StationDayRecord {
                state: state.to_string(),
                city: format!("C{i}"),
                station: format!("S{i}"),
                date: d(2019, 1, i as u32 + 1),
                readings,
                aqi: Some(1.0),
            })
            .unwrap();
        }
        t.sort_by_station_date();
        t
    }

    #[test]
    fn one_hot_rows_sum_to_one_per_source_column() {
        let t = multi_state_table();
        let (t, _) = impute_group_mean(&t).unwrap();
        let (t, _) = select_features(&t, &[]).unwrap();
        let (mut t, _) = fill_remaining_zero(&t).unwrap();
        t.set_split_side(Some(SplitSide::Train));
        let (encoded, map) = one_hot(&t, &["State".to_string()]).unwrap();
        let cols = map.output_columns("State");
        assert_eq!(cols.len(), 3);
        for row in 0..encoded.n_rows() {
            let sum: f64 = cols
                .iter()
                .map(|c| encoded.numeric(c).unwrap()[row].unwrap())
                .sum();
            assert_eq!(sum, 1.0);
        }
    }

    #[test]
    fn unseen_category_encodes_all_zeros_with_warning() {
        let map = EncodingMap {
            categories: BTreeMap::from([("State".to_string(), vec!["Delhi".to_string()])]),
        };
        let t = multi_state_table();
        let (t, _) = impute_group_mean(&t).unwrap();
        let (t, _) = select_features(&t, &[]).unwrap();
        let (mut t, _) = fill_remaining_zero(&t).unwrap();
        t.set_split_side(Some(SplitSide::Test));
        let (encoded, warnings) = one_hot_apply(&map, &t).unwrap();
        assert_eq!(warnings.len(), 1);
        let col = encoded.numeric("State=Delhi").unwrap();
        assert!(col.contains(&Some(0.0)));
    }

    #[test]
    fn scaler_standardizes_train_but_not_target() {
        let t = pipeline_to_split(&[
            ("A", d(2019, 1, 1), Some(0.0)),
            ("A", d(2019, 1, 2), Some(10.0)),
            ("A", d(2022, 10, 1), Some(5.0)),
        ]);
        let spec = SplitSpec::new(d(2019, 1, 1), d(2022, 10, 1), d(2023, 10, 15)).unwrap();
        let (train, test) = time_split(&t, &spec).unwrap();
        let (train_enc, map) = one_hot(&train, &[]).unwrap();
        let (test_enc, _) = one_hot_apply(&map, &test).unwrap();
        let params = fit_scaler(&train_enc).unwrap();
        assert_abs_diff_eq!(params.features["X"].mean, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(params.features["X"].std, 5.0, epsilon = 1e-12);
        let scaled = apply_scaler(&params, &train_enc).unwrap();
        assert_eq!(scaled.numeric("X").unwrap(), &[Some(-1.0), Some(1.0)]);
        // target untouched
        assert_eq!(scaled.numeric(COL_AQI).unwrap(), train_enc.numeric(COL_AQI).unwrap());
        // train-fitted params leave test mean nonzero in general
        let scaled_test = apply_scaler(&params, &test_enc).unwrap();
        assert_eq!(scaled_test.numeric("X").unwrap(), &[Some(0.0)]);
    }

    #[test]
    fn scaler_refuses_test_split() {
        let t = pipeline_to_split(&[
            ("A", d(2019, 1, 1), Some(0.0)),
            ("A", d(2022, 10, 1), Some(5.0)),
        ]);
        let spec = SplitSpec::new(d(2019, 1, 1), d(2022, 10, 1), d(2023, 10, 15)).unwrap();
        let (train, test) = time_split(&t, &spec).unwrap();
        let (_, map) = one_hot(&train, &[]).unwrap();
        let (test_enc, _) = one_hot_apply(&map, &test).unwrap();
        assert!(matches!(fit_scaler(&test_enc), Err(Error::PipelineOrder(_))));
    }
}
