//! Random forest regressor: bagged CART trees with per-split feature
//! subsampling. Per-tree randomness derives from (seed, tree index) so
//! results do not depend on thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::tree::{fit_tree_subsampled, DecisionTree, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    /// all features
    Auto,
    Sqrt,
    Log2,
}

impl std::str::FromStr for MaxFeatures {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(MaxFeatures::Auto),
            "sqrt" => Ok(MaxFeatures::Sqrt),
            "log2" => Ok(MaxFeatures::Log2),
            other => Err(Error::Config(format!(
                "unknown max_features '{other}' (expected auto, sqrt or log2)"
            ))),
        }
    }
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        match self {
            MaxFeatures::Auto => n_features,
            MaxFeatures::Sqrt => (n_features as f64).sqrt().ceil() as usize,
            MaxFeatures::Log2 => (n_features as f64).log2().ceil().max(1.0) as usize,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub max_features: MaxFeatures,
    pub min_samples_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_estimators: 100,
            max_depth: None,
            max_features: MaxFeatures::Auto,
            min_samples_leaf: 1,
            bootstrap: true,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestModel {
    pub params: ForestParams,
    pub trees: Vec<DecisionTree>,
    pub bootstrap_indices: Vec<Vec<usize>>,
    #[serde(default)]
    pub feature_names: Vec<String>,
}

impl ForestModel {
    /// Arithmetic mean of per-tree predictions.
    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for tree in &self.trees {
            for (o, row) in out.iter_mut().zip(x) {
                *o += tree.predict_row(row);
            }
        }
        let k = self.trees.len() as f64;
        out.iter_mut().for_each(|o| *o /= k);
        out
    }
}

pub fn fit_forest(x: &[Vec<f64>], y: &[f64], params: &ForestParams) -> Result<ForestModel> {
    if params.n_estimators == 0 {
        return Err(Error::Config("n_estimators must be at least 1".into()));
    }
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Data(
            "forest fitting needs matching, nonempty X and y".into(),
        ));
    }
    let n = x.len();
    let d = x[0].len();
    let k = params.max_features.resolve(d);
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf.max(1),
    };
    let fitted: Vec<(DecisionTree, Vec<usize>)> = (0..params.n_estimators)
        .into_par_iter()
        .map(|tree_idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(tree_idx as u64));
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let tree = fit_tree_subsampled(x, y, rows.clone(), &tree_params, k, &mut rng)?;
            Ok((tree, rows))
        })
        .collect::<Result<_>>()?;
    let (trees, bootstrap_indices) = fitted.into_iter().unzip();
    Ok(ForestModel {
        params: params.clone(),
        trees,
        bootstrap_indices,
        feature_names: Vec::new(),
    })
}
