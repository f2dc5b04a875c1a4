//! Acceptance suite: one numbered criterion per test, each printing a single
//! PASS line when its assertions hold (run with `--nocapture` to see them).

use std::time::Instant;

use chrono::NaiveDate;
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::json;

use aqicast::aqi::{compute_aqi, sub_index, BreakpointTable};
use aqicast::diagnostics::{acf, adf_test, pacf, schwert_max_lag, seasonal_decompose, AdfVerdict};
use aqicast::evaluate::{expanding_folds, grid_search, metrics, Grid, ModelFamily};
use aqicast::ingest::profile_missing;
use aqicast::models::{
    fit_booster, fit_forest, fit_tree, svr::fit_svr, svr::rbf_kernel, svr::SvrParams,
    BoosterParams, Dataset, ForestParams, TreeParams, TreeShape,
};
use aqicast::pipeline::{run_pipeline, RunConfig};
use aqicast::preprocess::{fill_remaining_zero, impute_group_mean, select_features};
use aqicast::sarimax::{difference, fit_sarimax, integrate, nelder_mead, SarimaSpec};
use aqicast::synth::{punch_holes, synthetic_table, SYNTH_FEATURES};
use aqicast::table::{DataTable, StationDayRecord, COL_AQI};

fn pass(id: u32, what: &str) {
    println!("[acceptance] criterion {id}: PASS - {what}");
}

fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

#[test]
fn criterion_01_missingness_arithmetic() {
    let total = 38277usize;
    let holes = [("Temp", 31746usize), ("RH", 8178), ("NOx", 1092)];
    let mut table = DataTable::new(&["Temp", "RH", "NOx"]);
    let start = date("2019-01-01");
    for i in 0..total {
        let mut readings = IndexMap::new();
        for (col, missing) in holes {
            readings.insert(col.to_string(), (i >= missing).then_some(1.0));
        }
        table
            .push_record(StationDayRecord {
                state: "Delhi".into(),
                city: "Delhi".into(),
                station: "S".into(),
                date: start + chrono::Duration::days((i % 1000) as i64),
                readings,
                aqi: None,
            })
            .unwrap();
    }
    let clock = Instant::now();
    let profile = profile_missing(&table).unwrap();
    assert!(clock.elapsed().as_secs_f64() < 1.0, "profiling too slow");
    assert_eq!(profile.total_rows, total);
    for (col, missing, percent) in [("Temp", 31746, 82.9), ("RH", 8178, 21.4), ("NOx", 1092, 2.9)] {
        let entry = profile.per_column.iter().find(|e| e.column == col).unwrap();
        assert_eq!(entry.missing_count, missing);
        assert_eq!(entry.missing_percent, percent, "{col} percent mismatch");
    }
    pass(1, "missingness profile reproduces the fixture percentages exactly");
}

/// Independent sub-index oracle: linear search over segments with gap
/// bridging and top-slope extrapolation.
fn oracle_sub_index(table: &BreakpointTable, pollutant: &str, conc: f64) -> f64 {
    let segs = table.segments(pollutant).unwrap();
    for (i, s) in segs.iter().enumerate() {
        if conc <= s.conc_hi {
            if conc >= s.conc_lo {
                return s.index_lo
                    + (s.index_hi - s.index_lo) / (s.conc_hi - s.conc_lo) * (conc - s.conc_lo);
            }
            let p = &segs[i - 1];
            return p.index_hi
                + (s.index_lo - p.index_hi) / (s.conc_lo - p.conc_hi) * (conc - p.conc_hi);
        }
    }
    let top = segs.last().unwrap();
    top.index_hi + (top.index_hi - top.index_lo) / (top.conc_hi - top.conc_lo) * (conc - top.conc_hi)
}

#[test]
fn criterion_02_aqi_oracle_equivalence() {
    let clock = Instant::now();
    let table = BreakpointTable::cpcb_default();
    let pollutants: Vec<String> = table.pollutants().map(str::to_string).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let mut readings = IndexMap::new();
        for p in &pollutants {
            if rng.gen_bool(0.7) {
                readings.insert(p.clone(), Some(rng.gen_range(0.0..600.0)));
            }
        }
        let record = StationDayRecord {
            state: "X".into(),
            city: "X".into(),
            station: "X".into(),
            date: date("2020-01-01"),
            readings: readings.clone(),
            aqi: None,
        };
        let got = compute_aqi(&record, &table).unwrap();
        // brute-force oracle: sub-indices, validity rule, max
        let subs: Vec<(String, f64)> = pollutants
            .iter()
            .filter_map(|p| {
                readings
                    .get(p)
                    .copied()
                    .flatten()
                    .map(|c| (p.clone(), oracle_sub_index(&table, p, c)))
            })
            .collect();
        let has_pm = subs.iter().any(|(p, _)| p == "PM2.5" || p == "PM10");
        let expected = if subs.len() >= 3 && has_pm {
            Some(subs.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max))
        } else {
            None
        };
        assert_eq!(got.aqi, expected, "AQI mismatch for {readings:?}");
        for (p, v) in &subs {
            assert_eq!(got.sub_indices[p], *v, "sub-index mismatch for {p}");
        }
    }
    // boundary values land exactly on segment endpoints
    for p in &pollutants {
        for s in table.segments(p).unwrap() {
            assert_eq!(sub_index(p, s.conc_lo, &table).unwrap(), s.index_lo);
            assert_eq!(sub_index(p, s.conc_hi, &table).unwrap(), s.index_hi);
        }
    }
    assert_eq!(sub_index("PM2.5", 75.5, &table).unwrap(), 150.5);
    assert!(clock.elapsed().as_secs_f64() < 1.0);
    pass(2, "compute_aqi matches the brute-force oracle on 1000 random records");
}

#[test]
fn criterion_03_group_mean_imputation() {
    let clock = Instant::now();
    let mut table = synthetic_table(10_000, 3);
    let holes = punch_holes(&mut table, 0.2, 4);
    let (imputed, mean_log) = impute_group_mean(&table).unwrap();
    // brute-force (station, year, month) means per column
    use chrono::Datelike;
    use std::collections::HashMap;
    let stations = table.stations().to_vec();
    let dates = table.dates().to_vec();
    let key = |row: usize| (stations[row].clone(), dates[row].year(), dates[row].month());
    for col in SYNTH_FEATURES {
        let before = table.numeric(col).unwrap().to_vec();
        let after = imputed.numeric(col).unwrap();
        let mut sums: HashMap<(String, i32, u32), (f64, usize)> = HashMap::new();
        for row in 0..table.n_rows() {
            if let Some(v) = before[row] {
                let entry = sums.entry(key(row)).or_default();
                entry.0 += v;
                entry.1 += 1;
            }
        }
        for row in 0..table.n_rows() {
            if before[row].is_some() {
                assert_eq!(after[row], before[row]);
                continue;
            }
            let (sum, count) = sums[&key(row)];
            let expected = sum / count as f64;
            assert!(
                (after[row].unwrap() - expected).abs() < 1e-9,
                "group-mean fill mismatch at row {row} of {col}"
            );
        }
    }
    // idempotence
    let (again, second_log) = impute_group_mean(&imputed).unwrap();
    assert_eq!(second_log.total_mean_fills(), 0);
    assert_eq!(again, imputed);
    // fill accounting across the whole pipeline
    let (selected, _) = select_features(&imputed, &[]).unwrap();
    let (_filled, zero_log) = fill_remaining_zero(&selected).unwrap();
    assert_eq!(mean_log.total_mean_fills() + zero_log.total_zero_fills(), holes);
    assert!(clock.elapsed().as_secs_f64() < 5.0);
    pass(3, "group-mean fills match brute force; fills account for every hole");
}

#[test]
fn criterion_04_metrics_exactness() {
    let m = metrics(&[100.0, 200.0, 300.0], &[110.0, 190.0, 310.0]).unwrap();
    assert!((m.mse - 100.0).abs() < 1e-9);
    assert!((m.rmse - 10.0).abs() < 1e-9);
    assert!((m.mae - 10.0).abs() < 1e-9);
    assert!((m.r2.unwrap() - 0.985).abs() < 1e-9);
    assert!((m.mape.unwrap() - 6.1111).abs() < 1e-4);
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..100 {
        let n = rng.gen_range(2..60);
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..400.0)).collect();
        let yhat: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..400.0)).collect();
        let m = metrics(&y, &yhat).unwrap();
        let nf = n as f64;
        let mse = y.iter().zip(&yhat).map(|(a, p)| (a - p) * (a - p)).sum::<f64>() / nf;
        let mae = y.iter().zip(&yhat).map(|(a, p)| (a - p).abs()).sum::<f64>() / nf;
        let ybar = y.iter().sum::<f64>() / nf;
        let ss_tot: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
        let mape = 100.0
            * y.iter()
                .zip(&yhat)
                .filter(|(a, _)| **a != 0.0)
                .map(|(a, p)| ((a - p) / a).abs())
                .sum::<f64>()
            / y.iter().filter(|a| **a != 0.0).count() as f64;
        assert!((m.mse - mse).abs() < 1e-9);
        assert!((m.rmse - mse.sqrt()).abs() < 1e-9);
        assert!((m.mae - mae).abs() < 1e-9);
        assert!((m.r2.unwrap() - (1.0 - mse * nf / ss_tot)).abs() < 1e-9);
        assert!((m.mape.unwrap() - mape).abs() < 1e-9);
    }
    pass(4, "metrics match hand computation and 100 brute-force recomputations");
}

#[test]
fn criterion_05_diagnostics() {
    let clock = Instant::now();
    let alternating: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let a = acf(&alternating, 1).unwrap();
    assert!((a[1] + 0.9).abs() < 1e-12, "acf(1) = {}", a[1]);
    let p = pacf(&alternating, 1).unwrap();
    assert!((p[1] - a[1]).abs() < 1e-12);

    let series: Vec<f64> = (0..24).map(|t| [1.0, 2.0, 3.0, 4.0][t % 4]).collect();
    let parts = seasonal_decompose(&series, 4).unwrap();
    for (i, expected) in [-1.5, -0.5, 0.5, 1.5].iter().enumerate() {
        assert!((parts.seasonal[i] - expected).abs() < 1e-9);
    }
    for r in parts.residual.iter().flatten() {
        assert!(r.abs() < 1e-9, "interior residual {r} not ~0");
    }

    let mut stationary_hits = 0;
    let mut walk_hits = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps: Vec<f64> = (0..500).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut ar = vec![0.0f64; 500];
        let mut walk = vec![0.0f64; 500];
        for t in 1..500 {
            ar[t] = 0.5 * ar[t - 1] + eps[t];
            walk[t] = walk[t - 1] + eps[t];
        }
        let lag = schwert_max_lag(500);
        if adf_test(&ar, lag).unwrap().verdict == AdfVerdict::Stationary {
            stationary_hits += 1;
        }
        if adf_test(&walk, lag).unwrap().verdict == AdfVerdict::NonStationary {
            walk_hits += 1;
        }
    }
    assert!(stationary_hits >= 95, "AR(1) detected stationary only {stationary_hits}/100");
    assert!(walk_hits >= 95, "random walk detected non-stationary only {walk_hits}/100");
    assert!(clock.elapsed().as_secs_f64() < 30.0);
    pass(5, "ACF/PACF, decomposition, and ADF verdicts all within spec");
}

#[test]
fn criterion_06_tree_forest_booster() {
    let clock = Instant::now();
    let data = Dataset::from_aqi_table(&synthetic_table(200, 6)).unwrap();
    let tree = fit_tree(&data.x, &data.y, &TreeParams::default()).unwrap();
    for (p, t) in tree.predict(&data.x).iter().zip(&data.y) {
        assert!((p - t).abs() < 1e-9, "unrestricted tree not interpolating");
    }

    let mut zero_lr = BoosterParams::new(TreeShape::Levelwise);
    zero_lr.learning_rate = 0.0;
    zero_lr.iterations = 3;
    let model = fit_booster(&data.x, &data.y, &zero_lr).unwrap();
    let mean = data.y.iter().sum::<f64>() / data.y.len() as f64;
    assert!(model.predict(&data.x).iter().all(|p| (p - mean).abs() < 1e-12));

    let big = Dataset::from_aqi_table(&synthetic_table(2000, 7)).unwrap();
    for shape in [TreeShape::Levelwise, TreeShape::Oblivious] {
        let mut params = BoosterParams::new(shape);
        params.iterations = 100;
        params.learning_rate = 0.05;
        params.depth = 3;
        params.tolerance = 0.0;
        let model = fit_booster(&big.x, &big.y, &params).unwrap();
        for w in model.training_rmse.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "training RMSE increased");
        }
    }

    let params = ForestParams {
        n_estimators: 12,
        max_depth: Some(6),
        ..Default::default()
    };
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let eight = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let a = one.install(|| fit_forest(&big.x, &big.y, &params)).unwrap();
    let b = eight.install(|| fit_forest(&big.x, &big.y, &params)).unwrap();
    assert_eq!(a.predict(&big.x), b.predict(&big.x), "forest not thread invariant");
    assert!(clock.elapsed().as_secs_f64() < 60.0);
    pass(6, "tree interpolation, booster monotonicity, forest thread invariance");
}

#[test]
fn criterion_07_svr() {
    let clock = Instant::now();
    let x: Vec<Vec<f64>> = [0.0, 1.0, 2.0, 3.0, 4.0].iter().map(|v| vec![*v]).collect();
    let y = vec![0.0, 0.8, 0.9, 0.1, -0.8];
    let params = SvrParams {
        c: 1.0,
        epsilon: 0.1,
        gamma: Some(0.5),
        ..Default::default()
    };
    let (model, _) = fit_svr(&x, &y, &params).unwrap();
    // independent dual objective on the full beta vector
    let gamma = 0.5;
    let dual = |beta: &[f64]| -> f64 {
        let mut quad = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                quad += beta[i] * beta[j] * rbf_kernel(&x[i], &x[j], gamma);
            }
        }
        -0.5 * quad - 0.1 * beta.iter().map(|b| b.abs()).sum::<f64>()
            + beta.iter().zip(&y).map(|(b, t)| b * t).sum::<f64>()
    };
    let mut full_beta = vec![0.0; 5];
    for (sv, coef) in model.support_vectors.iter().zip(&model.dual_coefs) {
        let idx = x.iter().position(|r| r == sv).unwrap();
        full_beta[idx] = *coef;
    }
    let fitted_value = dual(&full_beta);
    // brute-force grid QP over the simplex sum(beta) = 0, refined 6 times
    let mut center = vec![0.0f64; 4];
    let mut radius = 1.0f64;
    let mut best = f64::NEG_INFINITY;
    for _ in 0..6 {
        let mut best_point = center.clone();
        let steps: Vec<f64> = (-4..=4).map(|k| k as f64 / 4.0 * radius).collect();
        for a in &steps {
            for b in &steps {
                for c in &steps {
                    for d in &steps {
                        let free = [center[0] + a, center[1] + b, center[2] + c, center[3] + d];
                        let last = -free.iter().sum::<f64>();
                        if free.iter().chain([&last]).any(|v| v.abs() > 1.0) {
                            continue;
                        }
                        let beta = [free[0], free[1], free[2], free[3], last];
                        let value = dual(&beta);
                        if value > best {
                            best = value;
                            best_point = free.to_vec();
                        }
                    }
                }
            }
        }
        center = best_point;
        radius /= 4.0;
    }
    let relative = (best - fitted_value).abs() / best.abs().max(1e-12);
    assert!(relative < 1e-3, "dual gap {relative} vs oracle");

    // 200-point RBF fit at the published settings passes the KKT audit
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x200: Vec<Vec<f64>> = (0..200).map(|_| vec![rng.gen_range(0.0..10.0)]).collect();
    let y200: Vec<f64> = x200
        .iter()
        .map(|r| (r[0] * 0.9).sin() * 3.0 + 0.3 * r[0])
        .collect();
    let params = SvrParams {
        c: 100.0,
        epsilon: 0.1,
        ..Default::default()
    };
    let (model, _) = fit_svr(&x200, &y200, &params).unwrap();
    let violation = model.kkt_audit(&x200, &y200);
    assert!(violation <= 1e-3, "KKT violation {violation}");
    assert!(clock.elapsed().as_secs_f64() < 30.0);
    pass(7, "SVR dual matches the grid QP oracle; KKT audit passes at 1e-3");
}

#[test]
fn criterion_08_sarimax() {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let eps: Vec<f64> = (0..700).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut y = vec![0.0f64; 700];
    for t in 1..700 {
        y[t] = 0.8 * y[t - 1] + eps[t];
    }
    let series = y[200..].to_vec();
    let fit = fit_sarimax(&series, &[], &SarimaSpec::new(1, 0, 0)).unwrap();
    assert!(fit.ar[0] > 0.7 && fit.ar[0] < 0.9, "phi_hat {}", fit.ar[0]);

    for (d, seasonal_d, m) in [(1, 0, 1), (0, 1, 12), (2, 1, 7)] {
        let diffed = difference(&series, d, seasonal_d, m).unwrap();
        let back = integrate(&diffed);
        assert_eq!(back.len(), series.len());
        for (a, b) in back.iter().zip(&series) {
            assert!((a - b).abs() < 1e-9, "round trip drifted");
        }
    }

    let rosenbrock = |v: &[f64]| {
        (1.0 - v[0]) * (1.0 - v[0]) + 100.0 * (v[1] - v[0] * v[0]) * (v[1] - v[0] * v[0])
    };
    let result = nelder_mead(rosenbrock, &[-1.2, 1.0], &Default::default());
    assert!(result.value < 1e-6, "Rosenbrock objective {}", result.value);
    assert!(clock.elapsed().as_secs_f64() < 60.0);
    pass(8, "AR(1) recovery, exact differencing round trip, Rosenbrock minimum");
}

#[test]
fn criterion_09_grid_search() {
    let clock = Instant::now();
    let booster_grid = Grid::from_json(
        r#"{"depth": [3, 6, 8], "learning_rate": [0.01, 0.05, 0.1], "iterations": [100, 300, 500]}"#,
    )
    .unwrap();
    assert_eq!(booster_grid.n_combinations(), 27);
    let forest_grid = Grid::from_json(
        r#"{"n_estimators": [100, 200, 500], "max_depth": [3, 6, 8], "max_features": ["auto", "sqrt", "log2"]}"#,
    )
    .unwrap();
    assert_eq!(forest_grid.n_combinations(), 27);

    // leak sweep over the fold geometry
    for n in [8, 40, 100, 1234] {
        for folds in 1..6 {
            if let Ok(ranges) = expanding_folds(n, folds) {
                for (train, validate) in ranges {
                    assert!(train.end <= validate.start, "fold leaks future rows");
                    assert!(train.start == 0);
                }
            }
        }
    }

    // the reduced booster grid actually runs end to end
    let reduced = Grid::from_json(
        r#"{"depth": [3, 6, 8], "learning_rate": [0.01, 0.05, 0.1], "iterations": [10, 30, 50]}"#,
    )
    .unwrap();
    let table = synthetic_table(600, 9);
    let result = grid_search(ModelFamily::BoostOblivious, &reduced, &table, 3).unwrap();
    assert_eq!(result.scores.len(), 27);
    let min = result.scores.iter().map(|s| s.mean_rmse).fold(f64::INFINITY, f64::min);
    assert_eq!(result.best_mean_rmse, min);
    assert!(clock.elapsed().as_secs_f64() < 300.0);
    pass(9, "27-combination grids, leak-free folds, best equals minimum score");
}

#[test]
fn criterion_10_end_to_end_ranking() {
    let clock = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let table = synthetic_table(5000, 10);
    let input = dir.path().join("synthetic.csv");
    table.write_csv(&input).unwrap();
    let config: RunConfig = serde_json::from_value(json!({
        "canonical_input": input,
        "split_boundary": "2021-06-01",
        "drop": [],
        "folds": 1,
        "seed": 42,
        "models": {
            "forest": {"n_estimators": [20], "max_depth": [16]},
            "boost-level": {"iterations": [60], "depth": [5], "learning_rate": [0.1]},
            "boost-oblivious": {"iterations": [80], "depth": [6], "learning_rate": [0.1]}
        }
    }))
    .unwrap();
    let out = dir.path().join("out");
    let manifest = run_pipeline(&config, &out).unwrap();
    assert!(manifest.success);
    let matrix = aqicast::evaluate::PerformanceMatrix::read_csv(&out.join("performance_matrix.csv")).unwrap();
    let baseline_rank = matrix.rank_of("baseline").unwrap();
    for family in ["forest", "boost-level", "boost-oblivious"] {
        let row = matrix.rows.iter().find(|r| r.model == family).unwrap();
        assert!(
            row.r2.unwrap() >= 0.9,
            "{family} test R2 {} below 0.9",
            row.r2.unwrap()
        );
        assert!(
            matrix.rank_of(family).unwrap() < baseline_rank,
            "{family} does not outrank the baseline"
        );
        let residuals: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(out.join(format!("residuals_{family}.json"))).unwrap(),
        )
        .unwrap();
        let mean = residuals["mean"].as_f64().unwrap();
        let std = residuals["std"].as_f64().unwrap();
        assert!(
            mean.abs() < 0.05 * std,
            "{family} residual mean {mean} vs std {std}"
        );
    }
    assert!(clock.elapsed().as_secs_f64() < 300.0);
    pass(10, "forest and boosters reach R2 >= 0.9 and outrank the mean baseline");
}

#[test]
fn criterion_11_real_data_mode() {
    // Optional: point AQICAST_REAL_DATA at a CPCB export to get reported
    // (non-gating) checks against the published dataset-level figures.
    let Ok(path) = std::env::var("AQICAST_REAL_DATA") else {
        println!("[acceptance] criterion 11: SKIP - set AQICAST_REAL_DATA to a CPCB export to enable");
        return;
    };
    let ingested = aqicast::ingest::parse_cpcb_csv(
        &[path.clone().into()],
        &aqicast::ingest::SchemaConfig::cpcb_default(),
    )
    .unwrap();
    let table = ingested.table;
    let described = aqicast::diagnostics::describe(&table).unwrap();
    for col in &described.columns {
        println!(
            "[acceptance] criterion 11: REPORT describe {} count={} mean={:?} std={:?}",
            col.column, col.count, col.mean, col.std
        );
    }
    let correlations = aqicast::diagnostics::pearson_matrix(&table).unwrap();
    let mut best: Option<(&str, f64)> = None;
    for name in ["PM2.5", "PM10", "NO2", "CO", "SO2", "NH3", "NO", "NOx"] {
        if let Some(r) = correlations.get(name, COL_AQI) {
            if best.is_none() || r.abs() > best.unwrap().1.abs() {
                best = Some((name, r));
            }
        }
    }
    if let Some((name, r)) = best {
        println!("[acceptance] criterion 11: REPORT strongest AQI correlation {name} ({r:.3})");
    }
    if let Ok(heatmap) = aqicast::diagnostics::monthly_heatmap(&table, "State", "Delhi") {
        for (year, row) in heatmap.years.iter().zip(&heatmap.cells) {
            let argmax = row
                .iter()
                .enumerate()
                .filter_map(|(m, v)| v.map(|x| (m + 1, x)))
                .max_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((month, value)) = argmax {
                println!(
                    "[acceptance] criterion 11: REPORT Delhi {year} peak month {month} (mean AQI {value:.1})"
                );
            }
        }
    }
    println!("[acceptance] criterion 11: PASS - real-data figures reported (not gated)");
}
