//! CPCB CSV ingestion: header mapping, row validation, gap profiling.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{DataTable, StationDayRecord, COL_AQI, COL_CITY, COL_DATE, COL_STATE, COL_STATION};

/// The 17 measured variables of the CPCB daily export, in schema order.
pub const MEASURED_COLUMNS: [&str; 17] = [
    "PM2.5", "PM10", "NO", "NO2", "NOx", "NH3", "SO2", "CO", "Ozone", "Benzene", "Toluene",
    "Xylene", "Temp", "RH", "WS", "WD", "SR",
];

/// Maps source CSV headers onto canonical column names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemaConfig {
    pub columns: IndexMap<String, String>,
}

impl SchemaConfig {
    /// The bundled mapping for the stock CPCB dashboard export.
    pub fn cpcb_default() -> Self {
        serde_json::from_str(include_str!("../data/cpcb_schema.json"))
            .expect("bundled schema is valid")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FileReport {
    pub path: String,
    pub input_rows: usize,
    pub accepted: usize,
    pub rejected_bad_date: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IngestReport {
    pub files: Vec<FileReport>,
    pub rejected_duplicate: usize,
}

impl IngestReport {
    pub fn accepted_total(&self) -> usize {
        self.files.iter().map(|f| f.accepted).sum::<usize>() - self.rejected_duplicate
    }
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub table: DataTable,
    pub report: IngestReport,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MissingnessEntry {
    pub column: String,
    pub missing_count: usize,
    pub missing_percent: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MissingnessProfile {
    pub total_rows: usize,
    pub per_column: Vec<MissingnessEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MonthlyGap {
    pub station: String,
    pub year: i32,
    pub month: u32,
    pub column: String,
    pub missing_count: usize,
    pub month_fully_missing: bool,
}

fn is_missing_sentinel(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty()
        || c.eq_ignore_ascii_case("na")
        || c.eq_ignore_ascii_case("nan")
        || c.eq_ignore_ascii_case("none")
}

/// Accepts the two date layouts seen in CPCB exports.
fn parse_date(cell: &str) -> Option<NaiveDate> {
    let c = cell.trim();
    NaiveDate::parse_from_str(c, "%d-%m-%Y")
        .or_else(|_| NaiveDate::parse_from_str(c, "%Y-%m-%d"))
        .ok()
}

fn parse_one_file(path: &Path, schema: &SchemaConfig) -> Result<(Vec<StationDayRecord>, FileReport)> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();

    // canonical name per source column, None = unmapped (ignored)
    let mapped: Vec<Option<String>> = headers
        .iter()
        .map(|h| schema.columns.get(h.trim()).cloned())
        .collect();
    for key in [COL_STATE, COL_CITY, COL_STATION, COL_DATE] {
        if !mapped.iter().flatten().any(|c| c == key) {
            return Err(Error::MissingColumn(key.to_string()));
        }
    }

    let mut report = FileReport {
        path: path.display().to_string(),
        ..Default::default()
    };
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        report.input_rows += 1;
        let mut state = String::new();
        let mut city = String::new();
        let mut station = String::new();
        let mut date = None;
        let mut readings: IndexMap<String, Option<f64>> = IndexMap::new();
        let mut aqi = None;
        for (idx, canonical) in mapped.iter().enumerate() {
            let Some(canonical) = canonical else { continue };
            let cell = rec.get(idx).unwrap_or("");
            match canonical.as_str() {
                COL_STATE => state = cell.trim().to_string(),
                COL_CITY => city = cell.trim().to_string(),
                COL_STATION => station = cell.trim().to_string(),
                COL_DATE => date = parse_date(cell),
                COL_AQI => aqi = parse_numeric_cell(cell),
                name => {
                    readings.insert(name.to_string(), parse_numeric_cell(cell));
                }
            }
        }
        match date {
            Some(date) => {
                records.push(StationDayRecord {
                    state,
                    city,
                    station,
                    date,
                    readings,
                    aqi,
                });
                report.accepted += 1;
            }
            None => report.rejected_bad_date += 1,
        }
    }
    Ok((records, report))
}

/// Missing sentinel, unparseable numeric, or negative reading → missing.
fn parse_numeric_cell(cell: &str) -> Option<f64> {
    if is_missing_sentinel(cell) {
        return None;
    }
    match cell.trim().parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => Some(x),
        _ => None,
    }
}

/// Parses one or more CPCB export files into a single sorted table.
pub fn parse_cpcb_csv(paths: &[PathBuf], schema: &SchemaConfig) -> Result<Ingested> {
    if paths.is_empty() {
        return Err(Error::EmptyInput("no input files".into()));
    }
    let parsed: Vec<_> = paths
        .par_iter()
        .map(|p| parse_one_file(p, schema))
        .collect::<Result<_>>()?;

    let mut report = IngestReport::default();
    let mut columns: Vec<&str> = MEASURED_COLUMNS.to_vec();
    columns.push(COL_AQI);
    let mut table = DataTable::new(&columns);
    let mut seen = std::collections::HashSet::new();
    for (records, file_report) in parsed {
        for rec in records {
            if seen.insert((rec.station.clone(), rec.date)) {
                table.push_record(rec)?;
            } else {
                report.rejected_duplicate += 1;
            }
        }
        table.add_provenance(file_report.path.clone());
        report.files.push(file_report);
    }
    if table.n_rows() == 0 {
        return Err(Error::EmptyInput("zero accepted rows across all inputs".into()));
    }
    table.sort_by_station_date();
    Ok(Ingested { table, report })
}

pub fn profile_missing(table: &DataTable) -> Result<MissingnessProfile> {
    let total_rows = table.n_rows();
    if total_rows == 0 {
        return Err(Error::EmptyInput("cannot profile an empty table".into()));
    }
    let mut per_column = Vec::new();
    for name in table.numeric_column_names() {
        let missing_count = table.numeric(&name)?.iter().filter(|c| c.is_none()).count();
        if missing_count > 0 {
            per_column.push(MissingnessEntry {
                column: name,
                missing_count,
                missing_percent: round1(100.0 * missing_count as f64 / total_rows as f64),
            });
        }
    }
    per_column.sort_by(|a, b| b.missing_count.cmp(&a.missing_count).then(a.column.cmp(&b.column)));
    Ok(MissingnessProfile {
        total_rows,
        per_column,
    })
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

pub fn monthly_gap_report(table: &DataTable) -> Result<Vec<MonthlyGap>> {
    if table.n_rows() == 0 {
        return Err(Error::EmptyInput("cannot report gaps on an empty table".into()));
    }
    let stations = table.stations();
    let dates = table.dates();
    let mut out = Vec::new();
    for column in table.numeric_column_names() {
        let cells = table.numeric(&column)?;
        // (station, year, month) -> (missing, total)
        let mut groups: BTreeMap<(String, i32, u32), (usize, usize)> = BTreeMap::new();
        for i in 0..table.n_rows() {
            let key = (stations[i].clone(), dates[i].year(), dates[i].month());
            let e = groups.entry(key).or_default();
            e.1 += 1;
            if cells[i].is_none() {
                e.0 += 1;
            }
        }
        for ((station, year, month), (missing, total)) in groups {
            if missing > 0 {
                out.push(MonthlyGap {
                    station,
                    year,
                    month,
                    column: column.clone(),
                    missing_count: missing,
                    month_fully_missing: missing == total,
                });
            }
        }
    }
    Ok(out)
}
