//! CPCB AQI sub-index and overall-index computation.
//!
//! Sub-indices interpolate linearly inside breakpoint segments. CPCB tables
//! leave small gaps between consecutive segments (e.g. 60 → 61); values in a
//! gap are bridged linearly so the mapping stays continuous. Above the top
//! segment the mapping extrapolates with the top segment's slope rather than
//! clamping at 500.

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::StationDayRecord;

/// Widest inter-segment gap tolerated by validation, in concentration units.
const MAX_SEGMENT_GAP: f64 = 1.0 + 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub conc_lo: f64,
    pub conc_hi: f64,
    pub index_lo: f64,
    pub index_hi: f64,
}

#[derive(Debug, Clone)]
pub struct BreakpointTable {
    segments: IndexMap<String, Vec<Segment>>,
}

impl BreakpointTable {
    /// The bundled CPCB national AQI breakpoint table.
    pub fn cpcb_default() -> Self {
        Self::parse(include_str!("../data/breakpoints_cpcb.csv"))
            .expect("bundled breakpoint table is valid")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn parse(csv_text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
        let mut segments: IndexMap<String, Vec<Segment>> = IndexMap::new();
        for rec in rdr.deserialize::<(String, f64, f64, f64, f64)>() {
            let (pollutant, conc_lo, conc_hi, index_lo, index_hi) = rec?;
            segments.entry(pollutant).or_default().push(Segment {
                conc_lo,
                conc_hi,
                index_lo,
                index_hi,
            });
        }
        let table = BreakpointTable { segments };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        for (pollutant, segs) in &self.segments {
            if segs.is_empty() {
                return Err(Error::Config(format!("pollutant '{pollutant}' has no segments")));
            }
            for (i, s) in segs.iter().enumerate() {
                if s.conc_lo < 0.0 || s.conc_hi <= s.conc_lo || s.index_hi < s.index_lo {
                    return Err(Error::Config(format!(
                        "pollutant '{pollutant}' segment {i} is malformed"
                    )));
                }
                if i > 0 {
                    let prev = &segs[i - 1];
                    let gap = s.conc_lo - prev.conc_hi;
                    if !(0.0..=MAX_SEGMENT_GAP).contains(&gap) || s.index_lo < prev.index_hi {
                        return Err(Error::Config(format!(
                            "pollutant '{pollutant}' segments {i}-{} are not contiguous",
                            i - 1
                        )));
                    }
                }
            }
            let top = segs.last().unwrap();
            if (top.index_hi - 500.0).abs() > 1e-9 {
                return Err(Error::Config(format!(
                    "pollutant '{pollutant}' top segment must reach index 500"
                )));
            }
        }
        Ok(())
    }

    pub fn pollutants(&self) -> impl Iterator<Item = &str> {
        self.segments.keys().map(String::as_str)
    }

    pub fn segments(&self, pollutant: &str) -> Option<&[Segment]> {
        self.segments.get(pollutant).map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AqiResult {
    pub sub_indices: IndexMap<String, f64>,
    pub aqi: Option<f64>,
    pub dominant: Option<String>,
    pub valid: bool,
    pub reason: Option<String>,
}

fn lerp(x: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    y0 + (y1 - y0) / (x1 - x0) * (x - x0)
}

/// Maps one pollutant concentration onto the AQI scale.
pub fn sub_index(pollutant: &str, conc: f64, table: &BreakpointTable) -> Result<f64> {
    if !conc.is_finite() || conc < 0.0 {
        return Err(Error::Domain(format!(
            "concentration {conc} for '{pollutant}' must be finite and non-negative"
        )));
    }
    let segs = table
        .segments(pollutant)
        .ok_or_else(|| Error::Config(format!("unknown pollutant '{pollutant}'")))?;
    for (i, s) in segs.iter().enumerate() {
        if conc <= s.conc_hi {
            if conc >= s.conc_lo {
                return Ok(lerp(conc, s.conc_lo, s.conc_hi, s.index_lo, s.index_hi));
            }
            // inside the gap before this segment
            let prev = &segs[i - 1];
            return Ok(lerp(conc, prev.conc_hi, s.conc_lo, prev.index_hi, s.index_lo));
        }
    }
    let top = segs.last().unwrap();
    let slope = (top.index_hi - top.index_lo) / (top.conc_hi - top.conc_lo);
    Ok(top.index_hi + slope * (conc - top.conc_hi))
}

/// Computes every eligible sub-index and applies the validity rule:
/// at least three sub-indices, one of which is PM2.5 or PM10.
pub fn compute_aqi(record: &StationDayRecord, table: &BreakpointTable) -> Result<AqiResult> {
    let mut sub_indices = IndexMap::new();
    for pollutant in table.pollutants() {
        if let Some(Some(conc)) = record.readings.get(pollutant) {
            if conc.is_finite() && *conc >= 0.0 {
                sub_indices.insert(pollutant.to_string(), sub_index(pollutant, *conc, table)?);
            }
        }
    }
    let has_pm = sub_indices.contains_key("PM2.5") || sub_indices.contains_key("PM10");
    let (valid, reason) = if sub_indices.len() < 3 {
        (false, Some("fewer than three pollutants".to_string()))
    } else if !has_pm {
        (false, Some("no particulate matter sub-index".to_string()))
    } else {
        (true, None)
    };
    let (aqi, dominant) = if valid {
        let (name, value) = sub_indices
            .iter()
            .fold(None::<(&String, f64)>, |best, (n, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((n, v)),
            })
            .unwrap();
        (Some(value), Some(name.clone()))
    } else {
        (None, None)
    };
    Ok(AqiResult {
        sub_indices,
        aqi,
        dominant,
        valid,
        reason,
    })
}
