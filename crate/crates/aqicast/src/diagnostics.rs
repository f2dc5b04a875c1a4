//! Exploratory and time-series diagnostics: descriptive statistics, Pearson
//! correlation, monthly heat-map aggregation, classical additive seasonal
//! decomposition, the augmented Dickey-Fuller test, and ACF/PACF.

use std::collections::BTreeMap;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;
use crate::table::{DataTable, COL_AQI};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnDescription {
    pub column: String,
    pub count: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub min: Option<f64>,
    pub q25: Option<f64>,
    pub q50: Option<f64>,
    pub q75: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DescribeTable {
    pub columns: Vec<ColumnDescription>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub columns: Vec<String>,
    /// row-major; None where a pair has no defined correlation
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.columns.iter().position(|c| c == a)?;
        let j = self.columns.iter().position(|c| c == b)?;
        self.values[i][j]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatmapMatrix {
    pub group_column: String,
    pub group_value: String,
    pub years: Vec<i32>,
    /// one row per year, 12 monthly cells; None = no data
    pub cells: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub period: usize,
    /// None at the edges the centered moving average cannot reach
    pub trend: Vec<Option<f64>>,
    pub seasonal: Vec<f64>,
    pub residual: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdfVerdict {
    Stationary,
    NonStationary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdfReport {
    pub statistic: f64,
    pub lags: usize,
    pub regression: String,
    pub cv_1pct: f64,
    pub cv_5pct: f64,
    pub cv_10pct: f64,
    pub p_bracket: String,
    pub verdict: AdfVerdict,
}

pub fn describe(table: &DataTable) -> Result<DescribeTable> {
    let mut columns = Vec::new();
    for name in table.numeric_column_names() {
        let mut present: Vec<f64> = table.numeric(&name)?.iter().flatten().copied().collect();
        present.sort_by(f64::total_cmp);
        let count = present.len();
        let desc = if count == 0 {
            ColumnDescription {
                column: name,
                count,
                mean: None,
                std: None,
                min: None,
                q25: None,
                q50: None,
                q75: None,
                max: None,
            }
        } else {
            ColumnDescription {
                column: name,
                count,
                mean: Some(stats::mean(&present)),
                std: Some(stats::sample_std(&present)),
                min: Some(present[0]),
                q25: Some(stats::quantile_sorted(&present, 0.25)),
                q50: Some(stats::quantile_sorted(&present, 0.50)),
                q75: Some(stats::quantile_sorted(&present, 0.75)),
                max: Some(present[count - 1]),
            }
        };
        columns.push(desc);
    }
    Ok(DescribeTable { columns })
}

/// Pearson correlation over pairwise-complete rows.
pub fn pearson_matrix(table: &DataTable) -> Result<CorrelationMatrix> {
    if table.n_rows() < 2 {
        return Err(Error::InsufficientData(
            "correlation needs at least two rows".into(),
        ));
    }
    let columns = table.numeric_column_names();
    let data: Vec<&[Option<f64>]> = columns
        .iter()
        .map(|c| table.numeric(c))
        .collect::<Result<_>>()?;
    let k = columns.len();
    let mut values = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let pairs: Vec<(f64, f64)> = data[i]
                .iter()
                .zip(data[j])
                .filter_map(|(a, b)| Some((((*a)?), ((*b)?))))
                .collect();
            let r = pearson(&pairs);
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix { columns, values })
}

fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for &(x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Mean AQI per (year, month) for one state or city.
pub fn monthly_heatmap(
    table: &DataTable,
    group_column: &str,
    group_value: &str,
) -> Result<HeatmapMatrix> {
    let groups = table.keys(group_column)?;
    if !groups.iter().any(|g| g == group_value) {
        let mut available: Vec<&String> = groups.iter().collect();
        available.sort();
        available.dedup();
        return Err(Error::Data(format!(
            "unknown {group_column} '{group_value}'; available: {}",
            available
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let aqi = table.numeric(COL_AQI)?;
    let dates = table.dates();
    let mut sums: BTreeMap<(i32, u32), (f64, usize)> = BTreeMap::new();
    for i in 0..table.n_rows() {
        if groups[i] != group_value {
            continue;
        }
        if let Some(v) = aqi[i] {
            let e = sums.entry((dates[i].year(), dates[i].month())).or_default();
            e.0 += v;
            e.1 += 1;
        }
    }
    let years: Vec<i32> = {
        let mut ys: Vec<i32> = sums.keys().map(|&(y, _)| y).collect();
        ys.dedup();
        ys
    };
    let cells = years
        .iter()
        .map(|&y| {
            (1..=12)
                .map(|m| sums.get(&(y, m)).map(|&(s, n)| s / n as f64))
                .collect()
        })
        .collect();
    Ok(HeatmapMatrix {
        group_column: group_column.to_string(),
        group_value: group_value.to_string(),
        years,
        cells,
    })
}

/// Classical additive decomposition: centered moving-average trend
/// (2×m for even periods), re-centered per-phase seasonal means.
pub fn seasonal_decompose(series: &[f64], m: usize) -> Result<DecompositionResult> {
    if m < 2 {
        return Err(Error::Config("seasonal period must be at least 2".into()));
    }
    let n = series.len();
    if n < 2 * m {
        return Err(Error::InsufficientData(format!(
            "decomposition with period {m} needs at least {} points, got {n}",
            2 * m
        )));
    }
    let half = m / 2;
    let mut trend: Vec<Option<f64>> = vec![None; n];
    for t in 0..n {
        if m % 2 == 1 {
            if t >= half && t + half < n {
                let s: f64 = series[t - half..=t + half].iter().sum();
                trend[t] = Some(s / m as f64);
            }
        } else if t >= half && t + half < n {
            let mut s = 0.5 * series[t - half] + 0.5 * series[t + half];
            s += series[t - half + 1..t + half].iter().sum::<f64>();
            trend[t] = Some(s / m as f64);
        }
    }
    let mut phase_sum = vec![0.0; m];
    let mut phase_n = vec![0usize; m];
    for t in 0..n {
        if let Some(tr) = trend[t] {
            phase_sum[t % m] += series[t] - tr;
            phase_n[t % m] += 1;
        }
    }
    let mut seasonal_means: Vec<f64> = phase_sum
        .iter()
        .zip(&phase_n)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let grand = stats::mean(&seasonal_means);
    for s in &mut seasonal_means {
        *s -= grand;
    }
    let seasonal: Vec<f64> = (0..n).map(|t| seasonal_means[t % m]).collect();
    let residual: Vec<Option<f64>> = (0..n)
        .map(|t| trend[t].map(|tr| series[t] - tr - seasonal[t]))
        .collect();
    Ok(DecompositionResult {
        period: m,
        trend,
        seasonal,
        residual,
    })
}

/// Autocorrelation with the biased 1/n autocovariance estimator,
/// lags 0..=nlags.
pub fn acf(series: &[f64], nlags: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if nlags >= n.div_ceil(2) {
        return Err(Error::Config(format!(
            "nlags {nlags} must be below half the series length {n}"
        )));
    }
    let m = stats::mean(series);
    let c0: f64 = series.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
    if c0 <= 0.0 {
        return Err(Error::Data("zero-variance series has no ACF".into()));
    }
    let mut out = Vec::with_capacity(nlags + 1);
    for k in 0..=nlags {
        let ck: f64 = (k..n).map(|t| (series[t] - m) * (series[t - k] - m)).sum::<f64>() / n as f64;
        out.push(ck / c0);
    }
    Ok(out)
}

/// Partial autocorrelation via the Durbin–Levinson recursion,
/// lags 0..=nlags with pacf(0) = 1.
pub fn pacf(series: &[f64], nlags: usize) -> Result<Vec<f64>> {
    let rho = acf(series, nlags)?;
    let mut out = vec![1.0];
    if nlags == 0 {
        return Ok(out);
    }
    let mut phi_prev = vec![rho[1]];
    out.push(rho[1]);
    for k in 2..=nlags {
        let num = rho[k]
            - phi_prev
                .iter()
                .enumerate()
                .map(|(j, &p)| p * rho[k - 1 - j])
                .sum::<f64>();
        let den = 1.0
            - phi_prev
                .iter()
                .enumerate()
                .map(|(j, &p)| p * rho[j + 1])
                .sum::<f64>();
        let phi_kk = if den.abs() < 1e-14 { 0.0 } else { num / den };
        let mut phi = vec![0.0; k];
        phi[k - 1] = phi_kk;
        for j in 0..k - 1 {
            phi[j] = phi_prev[j] - phi_kk * phi_prev[k - 2 - j];
        }
        out.push(phi_kk);
        phi_prev = phi;
    }
    Ok(out)
}

/// Schwert's rule of thumb: ⌊12·(n/100)^(1/4)⌋.
pub fn schwert_max_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

struct AdfCriticalRow {
    n: usize,
    cv_1pct: f64,
    cv_5pct: f64,
    cv_10pct: f64,
}

fn adf_critical_values(effective_n: usize) -> AdfCriticalRow {
    let text = include_str!("../data/adf_critical_values.csv");
    let mut rows = Vec::new();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    for rec in rdr.deserialize::<(usize, f64, f64, f64)>() {
        let (n, c1, c5, c10) = rec.expect("bundled critical-value table is valid");
        rows.push(AdfCriticalRow {
            n,
            cv_1pct: c1,
            cv_5pct: c5,
            cv_10pct: c10,
        });
    }
    // smallest tabulated sample size at or above the effective sample
    rows.sort_by_key(|r| r.n);
    let idx = rows
        .iter()
        .position(|r| r.n >= effective_n)
        .unwrap_or(rows.len() - 1);
    rows.swap_remove(idx)
}

/// Augmented Dickey-Fuller test, constant-only regression:
/// Δy_t = α + ρ·y_{t−1} + Σ β_i·Δy_{t−i} + e_t, statistic = t(ρ).
pub fn adf_test(series: &[f64], max_lag: usize) -> Result<AdfReport> {
    let n = series.len();
    if n < max_lag + 10 {
        return Err(Error::InsufficientData(format!(
            "ADF with {max_lag} lags needs at least {} points, got {n}",
            max_lag + 10
        )));
    }
    if stats::population_std(series) == 0.0 {
        return Err(Error::Data("constant series has no ADF statistic".into()));
    }
    let diffs: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    // regression rows start so every lagged difference exists
    let start = max_lag; // index into diffs
    let k = 2 + max_lag; // constant, y_{t-1}, lagged diffs
    let mut design = Vec::new();
    let mut y = Vec::new();
    for t in start..diffs.len() {
        let mut row = Vec::with_capacity(k);
        row.push(1.0);
        row.push(series[t]); // y_{t-1} for the difference diffs[t] = y_{t+1}-y_t
        for i in 1..=max_lag {
            row.push(diffs[t - i]);
        }
        design.push(row);
        y.push(diffs[t]);
    }
    let effective_n = y.len();
    let (beta, residuals) = stats::ols(&design, &y)?;
    let dof = effective_n.saturating_sub(k);
    if dof == 0 {
        return Err(Error::InsufficientData("ADF regression has no degrees of freedom".into()));
    }
    let s2 = residuals.iter().map(|r| r * r).sum::<f64>() / dof as f64;
    // se(ρ) from the (1,1) entry of (X'X)^{-1}
    let mut xtx = vec![vec![0.0; k]; k];
    for row in &design {
        for i in 0..k {
            for j in 0..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    let mut unit = vec![0.0; k];
    unit[1] = 1.0;
    let inv_col = stats::solve_linear(xtx, unit)?;
    let se = (s2 * inv_col[1]).sqrt();
    let statistic = beta[1] / se;

    let cv = adf_critical_values(effective_n);
    let p_bracket = if statistic < cv.cv_1pct {
        "<0.01"
    } else if statistic < cv.cv_5pct {
        "<0.05"
    } else if statistic < cv.cv_10pct {
        "<0.10"
    } else {
        ">=0.10"
    };
    Ok(AdfReport {
        statistic,
        lags: max_lag,
        regression: "constant".into(),
        cv_1pct: cv.cv_1pct,
        cv_5pct: cv.cv_5pct,
        cv_10pct: cv.cv_10pct,
        p_bracket: p_bracket.into(),
        verdict: if statistic < cv.cv_5pct {
            AdfVerdict::Stationary
        } else {
            AdfVerdict::NonStationary
        },
    })
}
