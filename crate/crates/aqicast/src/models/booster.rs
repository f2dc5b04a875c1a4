//! Gradient boosting with squared-error loss.
//!
//! Two weak-learner shapes: `levelwise` depth-limited CART trees, and
//! `oblivious` trees where every level shares one (feature, threshold) test
//! so a depth-d tree has exactly 2^d leaves addressable by a bit pattern.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::tree::{fit_tree, DecisionTree, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeShape {
    Levelwise,
    Oblivious,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoosterParams {
    pub iterations: usize,
    pub learning_rate: f64,
    pub depth: usize,
    pub shape: TreeShape,
    /// stop early when one iteration improves training RMSE by less
    pub tolerance: f64,
    pub seed: u64,
}

impl BoosterParams {
    pub fn new(shape: TreeShape) -> Self {
        BoosterParams {
            iterations: 100,
            learning_rate: 0.1,
            depth: 6,
            shape,
            tolerance: 1e-12,
            seed: 42,
        }
    }
}

/// One level's shared test of an oblivious tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObliviousLevel {
    pub feature: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObliviousTree {
    pub levels: Vec<ObliviousLevel>,
    /// 2^depth leaf values, indexed by the bit pattern of level tests
    pub leaf_values: Vec<f64>,
}

impl ObliviousTree {
    /// Bitwise leaf lookup: bit l is set when row passes to the right at
    /// level l.
    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut idx = 0usize;
        for (l, level) in self.levels.iter().enumerate() {
            if row[level.feature] > level.threshold {
                idx |= 1 << l;
            }
        }
        idx
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.leaf_values[self.leaf_index(row)]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum BoostTree {
    Level(DecisionTree),
    Oblivious(ObliviousTree),
}

impl BoostTree {
    fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            BoostTree::Level(t) => t.predict_row(row),
            BoostTree::Oblivious(t) => t.predict_row(row),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoosterModel {
    pub params: BoosterParams,
    pub base_score: f64,
    pub trees: Vec<BoostTree>,
    pub training_rmse: Vec<f64>,
    #[serde(default)]
    pub feature_names: Vec<String>,
}

impl BoosterModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.base_score
            + self.params.learning_rate
                * self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter().map(|row| self.predict_row(row)).collect()
    }
}

/// Greedy oblivious fit: each level picks the single (feature, threshold)
/// pair that maximizes summed variance reduction across all current leaves.
fn fit_oblivious(x: &[Vec<f64>], y: &[f64], depth: usize) -> ObliviousTree {
    let n = x.len();
    let d = x[0].len();
    let mut levels: Vec<ObliviousLevel> = Vec::with_capacity(depth);
    let mut bucket_of: Vec<usize> = vec![0; n];
    for level in 0..depth {
        let n_buckets = 1usize << level;
        let mut best: Option<(usize, f64, f64)> = None; // feature, threshold, gain
        for feature in 0..d {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));
            let mut tot_n = vec![0f64; n_buckets];
            let mut tot_sum = vec![0f64; n_buckets];
            for i in 0..n {
                tot_n[bucket_of[i]] += 1.0;
                tot_sum[bucket_of[i]] += y[i];
            }
            let mut left_n = vec![0f64; n_buckets];
            let mut left_sum = vec![0f64; n_buckets];
            for w in 0..n - 1 {
                let i = order[w];
                let b = bucket_of[i];
                left_n[b] += 1.0;
                left_sum[b] += y[i];
                let v = x[i][feature];
                let v_next = x[order[w + 1]][feature];
                if v == v_next {
                    continue;
                }
                let threshold = v + (v_next - v) / 2.0;
                // gain = sum over buckets of between-group SSE reduction
                let mut gain = 0.0;
                for b in 0..n_buckets {
                    let ln = left_n[b];
                    let rn = tot_n[b] - ln;
                    if ln > 0.0 && rn > 0.0 {
                        let ls = left_sum[b];
                        let rs = tot_sum[b] - ls;
                        gain += ls * ls / ln + rs * rs / rn - tot_sum[b] * tot_sum[b] / tot_n[b];
                    }
                }
                if gain > best.as_ref().map_or(0.0, |b| b.2) + 1e-12 {
                    best = Some((feature, threshold, gain));
                }
            }
        }
        let (feature, threshold) = match best {
            Some((f, t, _)) => (f, t),
            // no useful split left; a constant test keeps the shape regular
            None => (0, f64::INFINITY),
        };
        for i in 0..n {
            if x[i][feature] > threshold {
                bucket_of[i] |= 1 << level;
            }
        }
        levels.push(ObliviousLevel { feature, threshold });
    }
    let n_leaves = 1usize << depth;
    let mut sums = vec![0.0; n_leaves];
    let mut counts = vec![0usize; n_leaves];
    for i in 0..n {
        sums[bucket_of[i]] += y[i];
        counts[bucket_of[i]] += 1;
    }
    let leaf_values = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    ObliviousTree {
        levels,
        leaf_values,
    }
}

pub fn fit_booster(x: &[Vec<f64>], y: &[f64], params: &BoosterParams) -> Result<BoosterModel> {
    if params.learning_rate < 0.0 {
        return Err(Error::Config("learning_rate must be non-negative".into()));
    }
    if params.iterations < 1 {
        return Err(Error::Config("iterations must be at least 1".into()));
    }
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Data(
            "booster fitting needs matching, nonempty X and y".into(),
        ));
    }
    let n = x.len();
    let base_score = y.iter().sum::<f64>() / n as f64;
    let mut predictions = vec![base_score; n];
    let mut trees = Vec::new();
    let mut training_rmse = Vec::new();
    let mut prev_rmse = rmse(y, &predictions);
    for _ in 0..params.iterations {
        let residuals: Vec<f64> = y.iter().zip(&predictions).map(|(t, p)| t - p).collect();
        let tree = match params.shape {
            TreeShape::Levelwise => {
                BoostTree::Level(fit_tree(x, &residuals, &TreeParams::with_depth(params.depth))?)
            }
            TreeShape::Oblivious => BoostTree::Oblivious(fit_oblivious(x, &residuals, params.depth)),
        };
        for (p, row) in predictions.iter_mut().zip(x) {
            *p += params.learning_rate * tree.predict_row(row);
        }
        trees.push(tree);
        let cur = rmse(y, &predictions);
        training_rmse.push(cur);
        if prev_rmse - cur < params.tolerance {
            break;
        }
        prev_rmse = cur;
    }
    Ok(BoosterModel {
        params: params.clone(),
        base_score,
        trees,
        training_rmse,
        feature_names: Vec::new(),
    })
}

fn rmse(y: &[f64], yhat: &[f64]) -> f64 {
    (y.iter()
        .zip(yhat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / y.len() as f64)
        .sqrt()
}
