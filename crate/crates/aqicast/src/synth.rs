//! Deterministic synthetic station data for tests, demos, and smoke runs.
//!
//! The target is a known nonlinear function of eight pollutant features plus
//! Gaussian noise, so ranking and fit-quality assertions have a ground truth
//! without shipping any real monitoring data.

use chrono::NaiveDate;
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::table::{DataTable, StationDayRecord};

pub const SYNTH_FEATURES: [&str; 8] = ["PM2.5", "PM10", "NO", "NO2", "NOx", "NH3", "CO", "SO2"];

const STATIONS: [(&str, &str, &str); 4] = [
    ("Delhi", "Delhi", "Anand Vihar"),
    ("Delhi", "Delhi", "RK Puram"),
    ("Punjab", "Amritsar", "Golden Temple"),
    ("Haryana", "Gurugram", "Vikas Sadan"),
];

/// Ground-truth response surface: linear terms, an interaction, a quadratic
/// bowl, and a smooth oscillation.
fn response(f: &[f64; 8]) -> f64 {
    let [pm25, pm10, no, no2, nox, nh3, co, so2] = *f;
    0.8 * pm25
        + 0.35 * pm10
        + 0.004 * pm25 * no2
        + 12.0 * co
        + 0.01 * (nox - 60.0) * (nox - 60.0)
        + 0.5 * so2
        + 0.2 * nh3
        + 0.3 * no
        + 15.0 * (pm10 / 40.0).sin()
}

/// Builds `n_rows` station-days across four stations with a noisy nonlinear
/// AQI target. Rows come out sorted by (station, date).
pub fn synthetic_table(n_rows: usize, seed: u64) -> DataTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 4.0).expect("fixed parameters are valid");
    let start = NaiveDate::from_ymd_opt(2019, 1, 1).expect("valid date");
    let mut table = DataTable::new(
        &SYNTH_FEATURES
            .iter()
            .copied()
            .chain(std::iter::once(crate::table::COL_AQI))
            .collect::<Vec<_>>(),
    );
    for i in 0..n_rows {
        let (state, city, station) = STATIONS[i % STATIONS.len()];
        let date = start + chrono::Duration::days((i / STATIONS.len()) as i64);
        let features = [
            rng.gen_range(10.0..250.0),  // PM2.5
            rng.gen_range(20.0..350.0),  // PM10
            rng.gen_range(2.0..60.0),    // NO
            rng.gen_range(5.0..90.0),    // NO2
            rng.gen_range(5.0..120.0),   // NOx
            rng.gen_range(2.0..50.0),    // NH3
            rng.gen_range(0.2..4.0),     // CO
            rng.gen_range(2.0..40.0),    // SO2
        ];
        let target = response(&features) + noise.sample(&mut rng);
        let mut readings = IndexMap::new();
        for (name, value) in SYNTH_FEATURES.iter().zip(features) {
            readings.insert((*name).to_string(), Some(value));
        }
        table
            .push_record(StationDayRecord {
                state: state.into(),
                city: city.into(),
                station: station.into(),
                date,
                readings,
                aqi: Some(target),
            })
            .expect("record matches the table schema");
    }
    table.sort_by_station_date();
    table.add_provenance(format!("synthetic(n={n_rows}, seed={seed})"));
    table
}

/// Blanks a fraction of feature cells uniformly at random (the target column
/// stays dense). Returns the number of holes punched.
pub fn punch_holes(table: &mut DataTable, rate: f64, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut holes = 0;
    for name in SYNTH_FEATURES {
        if let Ok(col) = table.numeric_mut(name) {
            for cell in col.iter_mut() {
                if rng.gen_bool(rate) {
                    *cell = None;
                    holes += 1;
                }
            }
        }
    }
    holes
}
