//! CART regression tree with variance-reduction splits.
//!
//! Threshold candidates are midpoints of consecutive sorted unique feature
//! values. Equal-gain ties resolve to the lowest feature index, then the
//! lowest threshold, so fits are deterministic.

use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub enum Node {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
        n_samples: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl TreeParams {
    pub fn with_depth(max_depth: usize) -> Self {
        TreeParams {
            max_depth: Some(max_depth),
            min_samples_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_features: usize,
    pub params: TreeParams,
    #[serde(default)]
    pub feature_names: Vec<String>,
}

impl DecisionTree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { value, .. } => return *value,
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter().map(|row| self.predict_row(row)).collect()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => 0,
                Node::Internal { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    gain: f64,
}

fn sse(y: &[f64], rows: &[usize]) -> f64 {
    let n = rows.len() as f64;
    let sum: f64 = rows.iter().map(|&i| y[i]).sum();
    let sumsq: f64 = rows.iter().map(|&i| y[i] * y[i]).sum();
    sumsq - sum * sum / n
}

/// Best variance-reduction split over the allowed features, or None when no
/// split satisfies min_samples_leaf or improves the criterion.
fn best_split(
    x: &[Vec<f64>],
    y: &[f64],
    rows: &[usize],
    features: &[usize],
    min_samples_leaf: usize,
) -> Option<SplitChoice> {
    let parent_sse = sse(y, rows);
    let mut best: Option<SplitChoice> = None;
    let mut sorted_features: Vec<usize> = features.to_vec();
    sorted_features.sort_unstable();
    for &feature in &sorted_features {
        let mut order: Vec<usize> = rows.to_vec();
        order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));
        let total_n = order.len() as f64;
        let total_sum: f64 = order.iter().map(|&i| y[i]).sum();
        let total_sumsq: f64 = order.iter().map(|&i| y[i] * y[i]).sum();
        let mut left_n = 0.0;
        let mut left_sum = 0.0;
        let mut left_sumsq = 0.0;
        for w in 0..order.len() - 1 {
            let i = order[w];
            left_n += 1.0;
            left_sum += y[i];
            left_sumsq += y[i] * y[i];
            let v = x[i][feature];
            let v_next = x[order[w + 1]][feature];
            if v == v_next {
                continue;
            }
            let left_count = w + 1;
            let right_count = order.len() - left_count;
            if left_count < min_samples_leaf || right_count < min_samples_leaf {
                continue;
            }
            let threshold = v + (v_next - v) / 2.0;
            let right_n = total_n - left_n;
            let left_sse = left_sumsq - left_sum * left_sum / left_n;
            let right_sum = total_sum - left_sum;
            let right_sse = (total_sumsq - left_sumsq) - right_sum * right_sum / right_n;
            let gain = parent_sse - left_sse - right_sse;
            if gain > best.as_ref().map_or(1e-12, |b| b.gain) {
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

fn build(
    x: &[Vec<f64>],
    y: &[f64],
    rows: Vec<usize>,
    depth: usize,
    params: &TreeParams,
    nodes: &mut Vec<Node>,
    feature_sampler: &mut dyn FnMut() -> Vec<usize>,
) -> usize {
    let leaf_value = rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64;
    let at_depth_limit = params.max_depth.is_some_and(|d| depth >= d);
    let splittable = rows.len() >= 2 * params.min_samples_leaf.max(1) && !at_depth_limit;
    let split = if splittable {
        best_split(x, y, &rows, &feature_sampler(), params.min_samples_leaf.max(1))
    } else {
        None
    };
    match split {
        None => {
            nodes.push(Node::Leaf {
                value: leaf_value,
                n_samples: rows.len(),
            });
            nodes.len() - 1
        }
        Some(choice) => {
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                .into_iter()
                .partition(|&i| x[i][choice.feature] <= choice.threshold);
            let idx = nodes.len();
            nodes.push(Node::Leaf {
                value: leaf_value,
                n_samples: 0,
            }); // placeholder
            let left = build(x, y, left_rows, depth + 1, params, nodes, feature_sampler);
            let right = build(x, y, right_rows, depth + 1, params, nodes, feature_sampler);
            nodes[idx] = Node::Internal {
                feature: choice.feature,
                threshold: choice.threshold,
                left,
                right,
            };
            idx
        }
    }
}

fn validate_input(x: &[Vec<f64>], y: &[f64]) -> Result<()> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Data(
            "tree fitting needs matching, nonempty X and y".into(),
        ));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("tree fitting rejects non-finite values".into()));
    }
    Ok(())
}

/// Fits a CART regression tree on the full feature set.
pub fn fit_tree(x: &[Vec<f64>], y: &[f64], params: &TreeParams) -> Result<DecisionTree> {
    validate_input(x, y)?;
    let n_features = x[0].len();
    let all: Vec<usize> = (0..n_features).collect();
    let mut nodes = Vec::new();
    build(
        x,
        y,
        (0..x.len()).collect(),
        0,
        params,
        &mut nodes,
        &mut || all.clone(),
    );
    Ok(DecisionTree {
        nodes,
        n_features,
        params: params.clone(),
        feature_names: Vec::new(),
    })
}

/// Forest-internal variant: samples `k` features without replacement at
/// every split.
pub(crate) fn fit_tree_subsampled(
    x: &[Vec<f64>],
    y: &[f64],
    rows: Vec<usize>,
    params: &TreeParams,
    k: usize,
    rng: &mut dyn RngCore,
) -> Result<DecisionTree> {
    validate_input(x, y)?;
    let n_features = x[0].len();
    let all: Vec<usize> = (0..n_features).collect();
    let mut nodes = Vec::new();
    build(x, y, rows, 0, params, &mut nodes, &mut || {
        if k >= n_features {
            all.clone()
        } else {
            let mut chosen: Vec<usize> = all
                .choose_multiple(rng, k)
                .copied()
                .collect();
            chosen.sort_unstable();
            chosen
        }
    });
    Ok(DecisionTree {
        nodes,
        n_features,
        params: params.clone(),
        feature_names: Vec::new(),
    })
}
