//! ε-insensitive support vector regression with an RBF kernel.
//!
//! The dual is solved over β = α − α* with a maximal-violating-pair scheme:
//! each step picks the pair (i, j) bounding the bias interval tightest and
//! minimizes the piecewise-quadratic restriction of the dual exactly along
//! the Σβ = 0 direction. Converged when the KKT violation (the amount by
//! which the bias lower bound exceeds the upper bound) falls under `tol`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    /// RBF width; defaults to 1/d when unset
    pub gamma: Option<f64>,
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            c: 100.0,
            epsilon: 0.1,
            gamma: None,
            tol: 1e-3,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvrModel {
    pub params: SvrParams,
    pub gamma: f64,
    pub support_vectors: Vec<Vec<f64>>,
    /// β = α − α* for each support vector
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub steps_used: usize,
    #[serde(default)]
    pub feature_names: Vec<String>,
}

pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, z)| (x - z) * (x - z)).sum();
    (-gamma * d2).exp()
}

impl SvrModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, &beta)| beta * rbf_kernel(sv, row, self.gamma))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter().map(|row| self.predict_row(row)).collect()
    }

    /// Dual objective value (maximization form) at the fitted coefficients,
    /// computed over the stored support vectors.
    pub fn dual_objective(&self, y_support: &[f64]) -> f64 {
        dual_objective_of(
            &self.support_vectors,
            y_support,
            &self.dual_coefs,
            self.gamma,
            self.params.epsilon,
        )
    }

    /// Maximum complementary-slackness violation over a training set.
    pub fn kkt_audit(&self, x: &[Vec<f64>], y: &[f64]) -> f64 {
        let ztol = 1e-8;
        let c = self.params.c;
        let eps = self.params.epsilon;
        let mut worst = 0.0f64;
        let mut beta_of = std::collections::HashMap::new();
        for (sv, &b) in self.support_vectors.iter().zip(&self.dual_coefs) {
            beta_of.insert(
                sv.iter().map(|v| v.to_bits()).collect::<Vec<u64>>(),
                b,
            );
        }
        for (row, &target) in x.iter().zip(y) {
            let key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
            let beta = beta_of.get(&key).copied().unwrap_or(0.0);
            let e = self.predict_row(row) - target;
            let v = if beta.abs() <= ztol {
                (e.abs() - eps).max(0.0)
            } else if beta >= c - ztol {
                (e + eps).max(0.0)
            } else if beta <= -c + ztol {
                (eps - e).max(0.0)
            } else if beta > 0.0 {
                (e + eps).abs()
            } else {
                (e - eps).abs()
            };
            worst = worst.max(v);
        }
        worst
    }
}

pub fn dual_objective_of(x: &[Vec<f64>], y: &[f64], beta: &[f64], gamma: f64, epsilon: f64) -> f64 {
    let n = x.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += beta[i] * beta[j] * rbf_kernel(&x[i], &x[j], gamma);
        }
    }
    -0.5 * quad - epsilon * beta.iter().map(|b| b.abs()).sum::<f64>()
        + y.iter().zip(beta).map(|(yi, b)| yi * b).sum::<f64>()
}

/// Change in the minimization-form dual when βi → βi+δ, βj → βj−δ.
fn pair_delta(
    delta: f64,
    grad_diff: f64,
    eta: f64,
    beta_i: f64,
    beta_j: f64,
    epsilon: f64,
) -> f64 {
    delta * grad_diff + 0.5 * eta * delta * delta
        + epsilon
            * ((beta_i + delta).abs() - beta_i.abs() + (beta_j - delta).abs() - beta_j.abs())
}

/// Exact minimizer of the piecewise-quadratic pair subproblem.
fn solve_pair(
    grad_diff: f64,
    eta: f64,
    beta_i: f64,
    beta_j: f64,
    c: f64,
    epsilon: f64,
) -> (f64, f64) {
    let lo = (-c - beta_i).max(beta_j - c);
    let hi = (c - beta_i).min(beta_j + c);
    if lo >= hi {
        return (0.0, 0.0);
    }
    let mut breaks = vec![lo, hi];
    for kink in [-beta_i, beta_j] {
        if kink > lo && kink < hi {
            breaks.push(kink);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let mut best = (0.0, 0.0);
    let mut consider = |delta: f64| {
        let d = pair_delta(delta, grad_diff, eta, beta_i, beta_j, epsilon);
        if d < best.1 {
            best = (delta, d);
        }
    };
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        consider(a);
        consider(b);
        if eta > 1e-12 {
            let mid = (a + b) / 2.0;
            let sig_i = if beta_i + mid >= 0.0 { 1.0 } else { -1.0 };
            let sig_j = if beta_j - mid >= 0.0 { 1.0 } else { -1.0 };
            let stationary = -(grad_diff + epsilon * (sig_i - sig_j)) / eta;
            if stationary > a && stationary < b {
                consider(stationary);
            }
        }
    }
    best
}

/// Fits ε-SVR. Returns the model plus any feature-scaling warnings.
pub fn fit_svr(x: &[Vec<f64>], y: &[f64], params: &SvrParams) -> Result<(SvrModel, Vec<String>)> {
    if params.c <= 0.0 {
        return Err(Error::Config("C must be positive".into()));
    }
    if params.epsilon < 0.0 {
        return Err(Error::Config("epsilon must be non-negative".into()));
    }
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Data("SVR needs matching, nonempty X and y".into()));
    }
    let n = x.len();
    let d = x[0].len();
    let gamma = params.gamma.unwrap_or(1.0 / d as f64);

    let mut warnings = Vec::new();
    for f in 0..d {
        let col: Vec<f64> = x.iter().map(|row| row[f]).collect();
        let std = stats::population_std(&col);
        if std > 10.0 || (std > 0.0 && std < 0.1) {
            warnings.push(format!(
                "feature {f} has standard deviation {std:.3}; SVR expects pre-scaled inputs"
            ));
        }
    }

    let kernel: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| rbf_kernel(&x[i], &x[j], gamma)).collect())
        .collect();
    let mut beta = vec![0.0f64; n];
    // gradient of the smooth dual part: F_i = Σ_k β_k K_ik − y_i
    let mut grad: Vec<f64> = y.iter().map(|yi| -yi).collect();

    let c = params.c;
    let eps = params.epsilon;
    let mut steps = 0usize;
    loop {
        // bias bounds: b ≥ L_i (for β_i < C), b ≤ H_i (for β_i > −C)
        let mut i_up = None;
        let mut l_max = f64::NEG_INFINITY;
        let mut j_low = None;
        let mut h_min = f64::INFINITY;
        for k in 0..n {
            if beta[k] < c {
                let sig = if beta[k] >= 0.0 { 1.0 } else { -1.0 };
                let l = -grad[k] - eps * sig;
                if l > l_max {
                    l_max = l;
                    i_up = Some(k);
                }
            }
            if beta[k] > -c {
                let sig = if beta[k] <= 0.0 { -1.0 } else { 1.0 };
                let h = -grad[k] - eps * sig;
                if h < h_min {
                    h_min = h;
                    j_low = Some(k);
                }
            }
        }
        let violation = l_max - h_min;
        if violation <= params.tol {
            let bias = (l_max + h_min) / 2.0;
            return Ok((finish(x, y, beta, bias, gamma, params, steps), warnings));
        }
        if steps >= params.max_steps {
            return Err(Error::Convergence(format!(
                "SVR did not converge after {steps} steps; KKT violation {violation:.6}"
            )));
        }
        let (i, j) = (i_up.unwrap(), j_low.unwrap());
        let eta = kernel[i][i] + kernel[j][j] - 2.0 * kernel[i][j];
        let (delta, improvement) = solve_pair(grad[i] - grad[j], eta, beta[i], beta[j], c, eps);
        if improvement >= -1e-14 {
            // the maximal violating pair is numerically stuck; accept
            return Err(Error::Convergence(format!(
                "SVR stalled at KKT violation {violation:.6}"
            )));
        }
        beta[i] += delta;
        beta[j] -= delta;
        for k in 0..n {
            grad[k] += delta * (kernel[i][k] - kernel[j][k]);
        }
        steps += 1;
    }
}

fn finish(
    x: &[Vec<f64>],
    _y: &[f64],
    beta: Vec<f64>,
    bias: f64,
    gamma: f64,
    params: &SvrParams,
    steps: usize,
) -> SvrModel {
    let mut support_vectors = Vec::new();
    let mut dual_coefs = Vec::new();
    for (row, &b) in x.iter().zip(&beta) {
        if b.abs() > 1e-12 {
            support_vectors.push(row.clone());
            dual_coefs.push(b);
        }
    }
    SvrModel {
        params: params.clone(),
        gamma,
        support_vectors,
        dual_coefs,
        bias,
        steps_used: steps,
        feature_names: Vec::new(),
    }
}
