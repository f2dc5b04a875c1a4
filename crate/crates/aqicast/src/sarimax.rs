//! Seasonal ARIMA with exogenous regressors for a single station's series.
//!
//! Estimation is conditional sum of squares: difference the series, then
//! minimize the sum of squared one-step residuals (zero pre-sample residuals,
//! burn-in excluded) with a Nelder-Mead simplex. This trades small coefficient
//! differences against state-space maximum likelihood for a solver that is
//! hand-checkable end to end.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orders (p,d,q)(P,D,Q,m) plus exogenous column names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SarimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_d: usize,
    pub seasonal_q: usize,
    pub m: usize,
    #[serde(default)]
    pub exog: Vec<String>,
}

impl SarimaSpec {
    pub fn new(p: usize, d: usize, q: usize) -> Self {
        SarimaSpec {
            p,
            d,
            q,
            seasonal_p: 0,
            seasonal_d: 0,
            seasonal_q: 0,
            m: 1,
            exog: Vec::new(),
        }
    }

    pub fn seasonal(mut self, seasonal_p: usize, seasonal_d: usize, seasonal_q: usize, m: usize) -> Self {
        self.seasonal_p = seasonal_p;
        self.seasonal_d = seasonal_d;
        self.seasonal_q = seasonal_q;
        self.m = m;
        self
    }

    pub fn with_exog(mut self, exog: Vec<String>) -> Self {
        self.exog = exog;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::Config("seasonal period m must be at least 1".into()));
        }
        if self.m == 1 && (self.seasonal_p > 0 || self.seasonal_d > 0 || self.seasonal_q > 0) {
            return Err(Error::Config(
                "seasonal orders require a seasonal period m > 1".into(),
            ));
        }
        Ok(())
    }

    /// Number of free parameters given the exogenous column count.
    fn n_params(&self) -> usize {
        1 + self.p + self.seasonal_p + self.q + self.seasonal_q + self.exog.len()
    }

    fn burn_in(&self) -> usize {
        (self.p + self.seasonal_p * self.m).max(self.q + self.seasonal_q * self.m)
    }
}

/// One applied differencing pass: the lag and the values it consumed, kept so
/// the pass can be inverted exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DiffStage {
    lag: usize,
    anchor: Vec<f64>,
}

/// Result of applying (1-B)^d (1-B^m)^D; seasonal passes run first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Differenced {
    pub values: Vec<f64>,
    stages: Vec<DiffStage>,
}

pub fn difference(series: &[f64], d: usize, seasonal_d: usize, m: usize) -> Result<Differenced> {
    let consumed = d + seasonal_d * m;
    if series.len() <= consumed {
        return Err(Error::InsufficientData(format!(
            "differencing with d={d}, D={seasonal_d}, m={m} consumes {consumed} points but the series has only {}",
            series.len()
        )));
    }
    let mut values = series.to_vec();
    let mut stages = Vec::with_capacity(d + seasonal_d);
    for _ in 0..seasonal_d {
        stages.push(diff_pass(&mut values, m));
    }
    for _ in 0..d {
        stages.push(diff_pass(&mut values, 1));
    }
    Ok(Differenced { values, stages })
}

fn diff_pass(values: &mut Vec<f64>, lag: usize) -> DiffStage {
    let anchor = values[..lag].to_vec();
    *values = values.windows(lag + 1).map(|w| w[lag] - w[0]).collect();
    DiffStage { lag, anchor }
}

/// Exact inverse of `difference`: replays each pass backwards from its anchor.
pub fn integrate(diffed: &Differenced) -> Vec<f64> {
    let mut values = diffed.values.clone();
    for stage in diffed.stages.iter().rev() {
        let mut rebuilt = stage.anchor.clone();
        for (t, w) in values.iter().enumerate() {
            let prev = rebuilt[t];
            rebuilt.push(w + prev);
        }
        values = rebuilt;
    }
    values
}

/// Parameter vector layout: intercept, phi, seasonal Phi, theta, seasonal
/// Theta, exogenous betas.
struct ParamView<'a> {
    intercept: f64,
    phi: &'a [f64],
    seasonal_phi: &'a [f64],
    theta: &'a [f64],
    seasonal_theta: &'a [f64],
    beta: &'a [f64],
}

fn split_params<'a>(params: &'a [f64], spec: &SarimaSpec) -> ParamView<'a> {
    let mut at = 1;
    let mut take = |len: usize| {
        let s = &params[at..at + len];
        at += len;
        s
    };
    ParamView {
        intercept: params[0],
        phi: take(spec.p),
        seasonal_phi: take(spec.seasonal_p),
        theta: take(spec.q),
        seasonal_theta: take(spec.seasonal_q),
        beta: take(spec.exog.len()),
    }
}

/// One-step residuals of the ARMA recursion on an already-differenced series.
/// Pre-sample lags (of both the series and the residuals) count as zero.
fn residual_recursion(
    params: &[f64],
    series: &[f64],
    exog: &[Vec<f64>],
    spec: &SarimaSpec,
) -> Vec<f64> {
    let v = split_params(params, spec);
    let n = series.len();
    let m = spec.m;
    let mut e = vec![0.0; n];
    for t in 0..n {
        let lagged = |s: &[f64], back: usize| if t >= back { s[t - back] } else { 0.0 };
        let mut pred = v.intercept;
        for (i, phi) in v.phi.iter().enumerate() {
            pred += phi * lagged(series, i + 1);
        }
        for (j, phi) in v.seasonal_phi.iter().enumerate() {
            pred += phi * lagged(series, (j + 1) * m);
        }
        for (i, theta) in v.theta.iter().enumerate() {
            pred += theta * lagged(&e, i + 1);
        }
        for (j, theta) in v.seasonal_theta.iter().enumerate() {
            pred += theta * lagged(&e, (j + 1) * m);
        }
        for (k, beta) in v.beta.iter().enumerate() {
            pred += beta * exog[k][t];
        }
        e[t] = series[t] - pred;
    }
    e
}

/// Conditional sum of squares past the burn-in index
/// max(p + P*m, q + Q*m). Non-finite parameters yield +inf so the simplex
/// optimizer can back away.
pub fn css_objective(params: &[f64], series: &[f64], exog: &[Vec<f64>], spec: &SarimaSpec) -> f64 {
    if params.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let e = residual_recursion(params, series, exog, spec);
    e[spec.burn_in().min(e.len())..].iter().map(|r| r * r).sum()
}

/// True when every root of 1 - c1 z - ... - ck z^k (AR form, `negate`) or
/// 1 + c1 z + ... + ck z^k (MA form) has modulus > 1.001.
fn lag_polynomial_stable(coeffs: &[f64], negate: bool) -> bool {
    // scale z by 1.001 so the margin folds into a plain unit-circle test
    let sign = if negate { -1.0 } else { 1.0 };
    let mut poly = vec![1.0];
    let mut scale = 1.0;
    for &c in coeffs {
        scale *= 1.001;
        poly.push(sign * c * scale);
    }
    while poly.len() > 1 && poly.last() == Some(&0.0) {
        poly.pop();
    }
    // roots of p(z) outside the unit circle <=> roots of the reversed
    // polynomial inside; run the Schur-Cohn reduction on the reversal
    poly.reverse();
    all_roots_inside_unit_circle(&poly)
}

/// Schur-Cohn test: all roots of a0 + a1 z + ... + an z^n strictly inside
/// the unit circle.
fn all_roots_inside_unit_circle(coeffs: &[f64]) -> bool {
    let mut a = coeffs.to_vec();
    while a.len() > 1 {
        let n = a.len() - 1;
        let lead = a[n];
        let tail = a[0];
        if tail.abs() >= lead.abs() {
            return false;
        }
        let next: Vec<f64> = (0..n).map(|k| lead * a[k + 1] - tail * a[n - 1 - k]).collect();
        a = next;
    }
    true
}

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// initial simplex displacement per coordinate
    pub step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_iterations: 5000,
            step: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Derivative-free simplex minimizer with the standard reflect / expand /
/// contract / shrink moves. Stops when the simplex diameter falls below 1e-8
/// or the value spread below 1e-10.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    objective: F,
    x0: &[f64],
    options: &NelderMeadOptions,
) -> NelderMeadResult {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), objective(x0)));
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += options.step;
        let fv = objective(&v);
        simplex.push((v, fv));
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < options.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        // both must hold: a value spread of zero alone can occur with the
        // simplex still straddling the minimum symmetrically
        if diameter < 1e-8 && spread.abs() < 1e-10 {
            converged = true;
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(v, _)| v[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let point_at = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };
        let reflected = point_at(ALPHA);
        let f_reflected = objective(&reflected);
        if f_reflected < simplex[0].1 {
            let expanded = point_at(GAMMA);
            let f_expanded = objective(&expanded);
            simplex[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_reflected);
            continue;
        }
        let contracted = if f_reflected < worst.1 {
            point_at(RHO) // outside contraction
        } else {
            point_at(-RHO) // inside contraction
        };
        let f_contracted = objective(&contracted);
        if f_contracted < f_reflected.min(worst.1) {
            simplex[dim] = (contracted, f_contracted);
            continue;
        }
        let best = simplex[0].0.clone();
        for entry in simplex[1..].iter_mut() {
            entry.0 = best
                .iter()
                .zip(&entry.0)
                .map(|(b, v)| b + SIGMA * (v - b))
                .collect();
            entry.1 = objective(&entry.0);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (argmin, value) = simplex.swap_remove(0);
    NelderMeadResult {
        argmin,
        value,
        iterations,
        converged,
    }
}

/// A fitted model. Carries the training series and exogenous history so
/// `forecast` can rebuild differencing state and residual tails on its own.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SarimaFit {
    pub spec: SarimaSpec,
    pub intercept: f64,
    pub ar: Vec<f64>,
    pub seasonal_ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub seasonal_ma: Vec<f64>,
    pub beta: Vec<f64>,
    pub sigma2: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    series: Vec<f64>,
    exog: Vec<Vec<f64>>,
}

impl SarimaFit {
    fn params(&self) -> Vec<f64> {
        let mut v = vec![self.intercept];
        v.extend_from_slice(&self.ar);
        v.extend_from_slice(&self.seasonal_ar);
        v.extend_from_slice(&self.ma);
        v.extend_from_slice(&self.seasonal_ma);
        v.extend_from_slice(&self.beta);
        v
    }
}

pub fn fit_sarimax(series: &[f64], exog: &[Vec<f64>], spec: &SarimaSpec) -> Result<SarimaFit> {
    spec.validate()?;
    if exog.len() != spec.exog.len() {
        return Err(Error::Config(format!(
            "spec names {} exogenous columns but {} were provided",
            spec.exog.len(),
            exog.len()
        )));
    }
    for (name, col) in spec.exog.iter().zip(exog) {
        if col.len() != series.len() {
            return Err(Error::Data(format!(
                "exogenous column '{name}' has {} rows, series has {}",
                col.len(),
                series.len()
            )));
        }
    }
    let min_len = 10 * (spec.p + spec.q + spec.seasonal_p + spec.seasonal_q + 2);
    if series.len() < min_len {
        return Err(Error::InsufficientData(format!(
            "series has {} points; at least {min_len} required for these orders",
            series.len()
        )));
    }
    if series.iter().chain(exog.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Data("series and exogenous columns must be dense and finite".into()));
    }
    let diffed = difference(series, spec.d, spec.seasonal_d, spec.m)?;
    let w = &diffed.values;
    // regressors undergo the same differencing as the target
    let exog_diffed: Vec<Vec<f64>> = exog
        .iter()
        .map(|col| difference(col, spec.d, spec.seasonal_d, spec.m).map(|d| d.values))
        .collect::<Result<_>>()?;
    let spec_owned = spec.clone();
    let penalized = |params: &[f64]| -> f64 {
        let v = split_params(params, &spec_owned);
        let stable = lag_polynomial_stable(v.phi, true)
            && lag_polynomial_stable(v.seasonal_phi, true)
            && lag_polynomial_stable(v.theta, false)
            && lag_polynomial_stable(v.seasonal_theta, false);
        if !stable {
            return f64::INFINITY;
        }
        css_objective(params, w, &exog_diffed, &spec_owned)
    };
    let mut x0 = vec![0.0; spec.n_params()];
    x0[0] = w.iter().sum::<f64>() / w.len() as f64;
    let result = nelder_mead(penalized, &x0, &NelderMeadOptions::default());
    let v = split_params(&result.argmin, spec);
    let n_effective = w.len().saturating_sub(spec.burn_in()).max(1);
    Ok(SarimaFit {
        spec: spec.clone(),
        intercept: v.intercept,
        ar: v.phi.to_vec(),
        seasonal_ar: v.seasonal_phi.to_vec(),
        ma: v.theta.to_vec(),
        seasonal_ma: v.seasonal_theta.to_vec(),
        beta: v.beta.to_vec(),
        sigma2: result.value / n_effective as f64,
        objective: result.value,
        iterations: result.iterations,
        converged: result.converged,
        series: series.to_vec(),
        exog: exog.to_vec(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Forecast {
    pub point: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Multiplies accumulated lag-polynomial coefficients by (1 - z^lag)^power.
fn apply_differencing(poly: Vec<f64>, lag: usize, power: usize) -> Vec<f64> {
    let mut acc = poly;
    for _ in 0..power {
        let mut next = vec![0.0; acc.len() + lag];
        for (k, &c) in acc.iter().enumerate() {
            next[k] += c;
            next[k + lag] -= c;
        }
        acc = next;
    }
    acc
}

/// Psi weights of the full (differencing included) model, for interval
/// variance: Var(h) = sigma^2 * sum_{j<h} psi_j^2.
fn psi_weights(fit: &SarimaFit, steps: usize) -> Vec<f64> {
    let spec = &fit.spec;
    let m = spec.m;
    // AR side: 1 - sum phi z^i - sum Phi z^{jm}, then differencing factors
    let mut ar = vec![0.0; spec.p.max(spec.seasonal_p * m) + 1];
    ar[0] = 1.0;
    for (i, phi) in fit.ar.iter().enumerate() {
        ar[i + 1] -= phi;
    }
    for (j, phi) in fit.seasonal_ar.iter().enumerate() {
        ar[(j + 1) * m] -= phi;
    }
    let ar = apply_differencing(ar, 1, spec.d);
    let ar = apply_differencing(ar, m, spec.seasonal_d);
    let mut ma = vec![0.0; spec.q.max(spec.seasonal_q * m) + 1];
    ma[0] = 1.0;
    for (i, theta) in fit.ma.iter().enumerate() {
        ma[i + 1] += theta;
    }
    for (j, theta) in fit.seasonal_ma.iter().enumerate() {
        ma[(j + 1) * m] += theta;
    }
    // psi_j = ma_j + sum_{i>=1} (-ar_i) psi_{j-i}
    let mut psi = vec![0.0; steps];
    for j in 0..steps {
        let mut value = if j < ma.len() { ma[j] } else { 0.0 };
        for i in 1..ar.len().min(j + 1) {
            value -= ar[i] * psi[j - i];
        }
        psi[j] = value;
    }
    psi
}

pub fn forecast(fit: &SarimaFit, steps: usize, exog_future: &[Vec<f64>]) -> Result<Forecast> {
    if exog_future.len() != fit.spec.exog.len() {
        return Err(Error::Config(format!(
            "model uses {} exogenous columns but {} future columns were provided",
            fit.spec.exog.len(),
            exog_future.len()
        )));
    }
    for (name, col) in fit.spec.exog.iter().zip(exog_future) {
        if col.len() != steps {
            return Err(Error::Data(format!(
                "future values for '{name}' cover {} steps, expected {steps}",
                col.len()
            )));
        }
    }
    if steps == 0 {
        return Ok(Forecast {
            point: vec![],
            lower: vec![],
            upper: vec![],
        });
    }
    let spec = &fit.spec;
    let m = spec.m;
    let diffed = difference(&fit.series, spec.d, spec.seasonal_d, m)?;
    // future exogenous rows get the same differencing, using training history
    // as the prefix
    let exog_future_diffed: Vec<Vec<f64>> = fit
        .exog
        .iter()
        .zip(exog_future)
        .map(|(hist, fut)| {
            let mut joined = hist.clone();
            joined.extend_from_slice(fut);
            difference(&joined, spec.d, spec.seasonal_d, m)
                .map(|d| d.values[d.values.len() - steps..].to_vec())
        })
        .collect::<Result<_>>()?;
    let exog_hist_diffed: Vec<Vec<f64>> = fit
        .exog
        .iter()
        .map(|col| difference(col, spec.d, spec.seasonal_d, m).map(|d| d.values))
        .collect::<Result<_>>()?;
    let params = fit.params();
    let residuals = residual_recursion(&params, &diffed.values, &exog_hist_diffed, spec);
    let v = split_params(&params, spec);
    let n = diffed.values.len();
    let mut w = diffed.values.clone();
    let mut e = residuals;
    for h in 0..steps {
        let t = n + h;
        let lagged = |s: &[f64], back: usize| if t >= back { s[t - back] } else { 0.0 };
        let mut pred = v.intercept;
        for (i, phi) in v.phi.iter().enumerate() {
            pred += phi * lagged(&w, i + 1);
        }
        for (j, phi) in v.seasonal_phi.iter().enumerate() {
            pred += phi * lagged(&w, (j + 1) * m);
        }
        for (i, theta) in v.theta.iter().enumerate() {
            pred += theta * lagged(&e, i + 1);
        }
        for (j, theta) in v.seasonal_theta.iter().enumerate() {
            pred += theta * lagged(&e, (j + 1) * m);
        }
        for (k, beta) in v.beta.iter().enumerate() {
            pred += beta * exog_future_diffed[k][h];
        }
        w.push(pred);
        e.push(0.0); // future shocks are unknown, expectation zero
    }
    // un-difference: replay each pass forward from its own rebuilt history
    let mut point = w[n..].to_vec();
    let mut history = Differenced {
        values: w[..n].to_vec(),
        stages: diffed.stages.clone(),
    };
    for _ in 0..diffed.stages.len() {
        let stage = history.stages.pop().expect("stage count matches loop");
        let inner = Differenced {
            values: history.values,
            stages: vec![stage],
        };
        let rebuilt = integrate(&inner);
        let mut extended = rebuilt;
        let lag = inner.stages[0].lag;
        for p in point.iter_mut() {
            let prev = extended[extended.len() - lag];
            *p += prev;
            extended.push(*p);
        }
        history = Differenced {
            values: extended[..extended.len() - steps].to_vec(),
            stages: history.stages,
        };
    }
    let psi = psi_weights(fit, steps);
    let mut cumulative = 0.0;
    let mut lower = Vec::with_capacity(steps);
    let mut upper = Vec::with_capacity(steps);
    for (h, p) in point.iter().enumerate() {
        cumulative += psi[h] * psi[h];
        let half_width = 1.96 * (fit.sigma2 * cumulative).sqrt();
        lower.push(p - half_width);
        upper.push(p + half_width);
    }
    Ok(Forecast {
        point,
        lower,
        upper,
    })
}
