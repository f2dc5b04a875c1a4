//! Column-oriented, time-indexed table with per-cell missingness.
//!
//! Every pipeline stage consumes and produces a [`DataTable`]. Key columns
//! (`State`, `City`, `Station`) hold text, `Date` holds calendar days, and
//! every other column is numeric with an explicit missingness mask.

use std::path::Path;

use chrono::NaiveDate;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const COL_STATE: &str = "State";
pub const COL_CITY: &str = "City";
pub const COL_STATION: &str = "Station";
pub const COL_DATE: &str = "Date";
pub const COL_AQI: &str = "AQI";

pub const KEY_COLUMNS: [&str; 4] = [COL_STATE, COL_CITY, COL_STATION, COL_DATE];

/// Preprocessing progress marker. Operations check it so the cleaning
/// pipeline can only run in its declared order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    Raw,
    MeanImputed,
    Selected,
    ZeroFilled,
    Encoded,
    Scaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitSide {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Key(Vec<String>),
    Date(Vec<NaiveDate>),
    Numeric(Vec<Option<f64>>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Key(v) => v.len(),
            ColumnData::Date(v) => v.len(),
            ColumnData::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    Key,
    Date,
    Numeric,
}

/// One station-day seen as a row: keys plus the pollutant readings.
#[derive(Debug, Clone)]
pub struct StationDayRecord {
    pub state: String,
    pub city: String,
    pub station: String,
    pub date: NaiveDate,
    pub readings: IndexMap<String, Option<f64>>,
    pub aqi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    columns: IndexMap<String, ColumnData>,
    provenance: Vec<String>,
    stage: Stage,
    split: Option<SplitSide>,
}

impl DataTable {
    /// Builds a table with the four key columns and the given numeric columns.
    pub fn new(numeric_columns: &[&str]) -> Self {
        let mut columns = IndexMap::new();
        columns.insert(COL_STATE.to_string(), ColumnData::Key(Vec::new()));
        columns.insert(COL_CITY.to_string(), ColumnData::Key(Vec::new()));
        columns.insert(COL_STATION.to_string(), ColumnData::Key(Vec::new()));
        columns.insert(COL_DATE.to_string(), ColumnData::Date(Vec::new()));
        for name in numeric_columns {
            columns.insert((*name).to_string(), ColumnData::Numeric(Vec::new()));
        }
        DataTable {
            columns,
            provenance: Vec::new(),
            stage: Stage::Raw,
            split: None,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.columns.get(COL_DATE).map_or(0, ColumnData::len)
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn set_stage(&mut self, stage: Stage) {
        self.stage = stage;
    }

    pub fn split_side(&self) -> Option<SplitSide> {
        self.split
    }

    pub fn set_split_side(&mut self, side: Option<SplitSide>) {
        self.split = side;
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn add_provenance(&mut self, source: impl Into<String>) {
        self.provenance.push(source.into());
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    pub fn numeric_column_names(&self) -> Vec<String> {
        self.columns
            .iter()
            .filter(|(_, c)| matches!(c, ColumnData::Numeric(_)))
            .map(|(n, _)| n.clone())
            .collect()
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.contains_key(name)
    }

    pub fn column_kind(&self, name: &str) -> Option<ColumnKind> {
        self.columns.get(name).map(|c| match c {
            ColumnData::Key(_) => ColumnKind::Key,
            ColumnData::Date(_) => ColumnKind::Date,
            ColumnData::Numeric(_) => ColumnKind::Numeric,
        })
    }

    pub fn numeric(&self, name: &str) -> Result<&[Option<f64>]> {
        match self.columns.get(name) {
            Some(ColumnData::Numeric(v)) => Ok(v),
            Some(_) => Err(Error::SchemaMismatch(format!(
                "column '{name}' is not numeric"
            ))),
            None => Err(Error::MissingColumn(name.to_string())),
        }
    }

    pub fn numeric_mut(&mut self, name: &str) -> Result<&mut Vec<Option<f64>>> {
        match self.columns.get_mut(name) {
            Some(ColumnData::Numeric(v)) => Ok(v),
            Some(_) => Err(Error::SchemaMismatch(format!(
                "column '{name}' is not numeric"
            ))),
            None => Err(Error::MissingColumn(name.to_string())),
        }
    }

    pub fn keys(&self, name: &str) -> Result<&[String]> {
        match self.columns.get(name) {
            Some(ColumnData::Key(v)) => Ok(v),
            Some(_) => Err(Error::SchemaMismatch(format!("column '{name}' is not a key"))),
            None => Err(Error::MissingColumn(name.to_string())),
        }
    }

    pub fn dates(&self) -> &[NaiveDate] {
        match self.columns.get(COL_DATE) {
            Some(ColumnData::Date(v)) => v,
            _ => &[],
        }
    }

    pub fn stations(&self) -> &[String] {
        match self.columns.get(COL_STATION) {
            Some(ColumnData::Key(v)) => v,
            _ => &[],
        }
    }

    pub fn push_record(&mut self, record: StationDayRecord) -> Result<()> {
        for (name, col) in self.columns.iter_mut() {
            match col {
                ColumnData::Key(v) => v.push(match name.as_str() {
                    COL_STATE => record.state.clone(),
                    COL_CITY => record.city.clone(),
                    COL_STATION => record.station.clone(),
                    other => {
                        return Err(Error::SchemaMismatch(format!(
                            "unexpected key column '{other}' when pushing a record"
                        )))
                    }
                }),
                ColumnData::Date(v) => v.push(record.date),
                ColumnData::Numeric(v) => {
                    let cell = if name == COL_AQI {
                        record.aqi
                    } else {
                        record.readings.get(name).copied().flatten()
                    };
                    v.push(cell);
                }
            }
        }
        Ok(())
    }

    pub fn record(&self, row: usize) -> StationDayRecord {
        let mut readings = IndexMap::new();
        let mut aqi = None;
        for (name, col) in &self.columns {
            if let ColumnData::Numeric(v) = col {
                if name == COL_AQI {
                    aqi = v[row];
                } else {
                    readings.insert(name.clone(), v[row]);
                }
            }
        }
        StationDayRecord {
            state: self.keys(COL_STATE).map(|v| v[row].clone()).unwrap_or_default(),
            city: self.keys(COL_CITY).map(|v| v[row].clone()).unwrap_or_default(),
            station: self
                .keys(COL_STATION)
                .map(|v| v[row].clone())
                .unwrap_or_default(),
            date: self.dates()[row],
            readings,
            aqi,
        }
    }

    pub fn add_numeric_column(&mut self, name: &str, values: Vec<Option<f64>>) -> Result<()> {
        if self.columns.contains_key(name) {
            return Err(Error::SchemaMismatch(format!(
                "column '{name}' already exists"
            )));
        }
        if values.len() != self.n_rows() {
            return Err(Error::SchemaMismatch(format!(
                "column '{name}' has {} values for {} rows",
                values.len(),
                self.n_rows()
            )));
        }
        self.columns
            .insert(name.to_string(), ColumnData::Numeric(values));
        Ok(())
    }

    pub fn drop_column(&mut self, name: &str) -> bool {
        self.columns.shift_remove(name).is_some()
    }

    /// Keeps rows at the given indices, preserving their relative order.
    pub fn filter_rows(&self, keep: &[usize]) -> DataTable {
        let mut out = self.clone();
        for col in out.columns.values_mut() {
            match col {
                ColumnData::Key(v) => *v = keep.iter().map(|&i| v[i].clone()).collect(),
                ColumnData::Date(v) => *v = keep.iter().map(|&i| v[i]).collect(),
                ColumnData::Numeric(v) => *v = keep.iter().map(|&i| v[i]).collect(),
            }
        }
        out
    }

    /// Sorts rows ascending by (station, date).
    pub fn sort_by_station_date(&mut self) {
        let mut order: Vec<usize> = (0..self.n_rows()).collect();
        let stations = self.stations().to_vec();
        let dates = self.dates().to_vec();
        order.sort_by(|&a, &b| (&stations[a], dates[a]).cmp(&(&stations[b], dates[b])));
        for col in self.columns.values_mut() {
            match col {
                ColumnData::Key(v) => *v = order.iter().map(|&i| v[i].clone()).collect(),
                ColumnData::Date(v) => *v = order.iter().map(|&i| v[i]).collect(),
                ColumnData::Numeric(v) => *v = order.iter().map(|&i| v[i]).collect(),
            }
        }
    }

    /// Writes the canonical CSV form: ISO dates, empty cell = missing.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| Error::Data(format!("cannot write {}: {e}", path.display())))?;
        w.write_record(self.columns.keys())?;
        for row in 0..self.n_rows() {
            let mut rec = Vec::with_capacity(self.columns.len());
            for col in self.columns.values() {
                match col {
                    ColumnData::Key(v) => rec.push(v[row].clone()),
                    ColumnData::Date(v) => rec.push(v[row].format("%Y-%m-%d").to_string()),
                    ColumnData::Numeric(v) => rec.push(match v[row] {
                        Some(x) => format_cell(x),
                        None => String::new(),
                    }),
                }
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(())
    }

    /// Reads a canonical CSV written by [`DataTable::write_csv`].
    pub fn read_csv(path: &Path) -> Result<DataTable> {
        let mut rdr = csv::Reader::from_path(path)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut columns: IndexMap<String, ColumnData> = IndexMap::new();
        for h in &headers {
            let col = if h == COL_DATE {
                ColumnData::Date(Vec::new())
            } else if KEY_COLUMNS.contains(&h.as_str()) {
                ColumnData::Key(Vec::new())
            } else {
                ColumnData::Numeric(Vec::new())
            };
            columns.insert(h.clone(), col);
        }
        for rec in rdr.records() {
            let rec = rec?;
            for (h, cell) in headers.iter().zip(rec.iter()) {
                match columns.get_mut(h).unwrap() {
                    ColumnData::Key(v) => v.push(cell.to_string()),
                    ColumnData::Date(v) => v.push(
                        NaiveDate::parse_from_str(cell, "%Y-%m-%d")
                            .map_err(|_| Error::Data(format!("bad ISO date '{cell}'")))?,
                    ),
                    ColumnData::Numeric(v) => {
                        if cell.is_empty() {
                            v.push(None);
                        } else {
                            v.push(Some(cell.parse::<f64>().map_err(|_| {
                                Error::Data(format!("bad numeric cell '{cell}' in column '{h}'"))
                            })?));
                        }
                    }
                }
            }
        }
        Ok(DataTable {
            columns,
            provenance: vec![path.display().to_string()],
            stage: Stage::Raw,
            split: None,
        })
    }
}

/// Round-trip safe float formatting for CSV cells.
fn format_cell(x: f64) -> String {
    let short = format!("{x}");
    if short.parse::<f64>() == Ok(x) {
        short
    } else {
        format!("{x:?}")
    }
}
