//! Lag-window features and gradient-boosted regression trees.
//!
//! Boosting uses squared loss: the base score is the target mean, each round
//! fits a depth-limited tree to the current residuals by exact greedy splits
//! over the raw feature values, and its leaf means (scaled by the learning
//! rate) are added to the prediction. There is no row or column subsampling,
//! so fits are deterministic.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, SalesSeries};

/// Inputs for predicting period `t`: the previous `m` values (oldest first)
/// and a one-hot encoding of `t`'s season position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFeatures {
    /// `y[t-m] .. y[t-1]`.
    pub lags: Vec<f64>,
    /// One-hot season of the target period.
    pub season: Vec<f64>,
}

impl WindowFeatures {
    /// Builds the features for the period after `history`.
    ///
    /// `history` must hold at least `m` values; only the last `m` are used.
    pub fn for_next(history: &[f64], next_season: usize, m: usize) -> Self {
        let lags = history[history.len() - m..].to_vec();
        let mut season = vec![0.0; m];
        season[next_season] = 1.0;
        Self { lags, season }
    }

    /// Concatenated feature vector of length `2m`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.lags.clone();
        v.extend_from_slice(&self.season);
        v
    }
}

/// Transform applied to lags and targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowScaling {
    /// Divide values by this before any other transform.
    pub scale: f64,
    /// Apply `log1p` after scaling (inverted with `expm1` on prediction).
    pub log1p: bool,
}

impl Default for WindowScaling {
    fn default() -> Self {
        Self { scale: 1.0, log1p: false }
    }
}

impl WindowScaling {
    /// Forward transform.
    pub fn apply(&self, v: f64) -> f64 {
        let x = v / self.scale;
        if self.log1p {
            crate::num::ln_1p(x.max(0.0))
        } else {
            x
        }
    }

    /// Inverse transform.
    pub fn invert(&self, v: f64) -> f64 {
        let x = if self.log1p { crate::num::exp_m1(v) } else { v };
        x * self.scale
    }
}

/// One training row per period `t ≥ m`, values untransformed.
pub fn make_window_features(series: &SalesSeries) -> Vec<(WindowFeatures, f64)> {
    make_window_features_with(series, &WindowScaling::default())
}

/// As [`make_window_features`] with scaling and optional `log1p` applied to
/// both lags and targets.
pub fn make_window_features_with(series: &SalesSeries, scaling: &WindowScaling) -> Vec<(WindowFeatures, f64)> {
    let m = series.frequency().season_length();
    let y: Vec<f64> = series.values().iter().map(|v| scaling.apply(*v)).collect();
    if y.len() <= m {
        return Vec::new();
    }
    (m..y.len())
        .map(|t| {
            let season = series.start().offset(t).season();
            (WindowFeatures::for_next(&y[..t], season, m), y[t])
        })
        .collect()
}

/// Boosting hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    /// Boosting rounds.
    pub rounds: usize,
    /// Shrinkage per round.
    pub learning_rate: f64,
    /// Maximum tree depth.
    pub max_depth: usize,
    /// Minimum rows in each leaf.
    pub min_leaf: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self { rounds: 200, learning_rate: 0.1, max_depth: 3, min_leaf: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf(f64),
}

/// One regression tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(v) => return *v,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[*feature] < *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Number of leaves.
    pub fn leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }
}

/// A boosted tree ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedTrees {
    /// Initial prediction (target mean).
    pub base: f64,
    /// Fitted trees.
    pub trees: Vec<Tree>,
    /// Hyperparameters used.
    pub params: BoostParams,
}

impl BoostedTrees {
    /// Prediction for one feature vector.
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.base + self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }
}

/// Fits with the default hyperparameters.
pub fn fit_boosted_trees(rows: &[(WindowFeatures, f64)]) -> Result<BoostedTrees> {
    let features: Vec<Vec<f64>> = rows.iter().map(|(w, _)| w.to_vec()).collect();
    let targets: Vec<f64> = rows.iter().map(|(_, y)| *y).collect();
    fit_boosted_matrix(&features, &targets, BoostParams::default())
}

#[derive(Clone, Copy, Default)]
struct Stats {
    count: usize,
    sum: f64,
}

#[derive(Clone, Copy)]
struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Fits on an explicit feature matrix (rows × features).
pub fn fit_boosted_matrix(features: &[Vec<f64>], targets: &[f64], params: BoostParams) -> Result<BoostedTrees> {
    let n = targets.len();
    if n == 0 {
        return Err(Error::Length { expected: 1, actual: 0 });
    }
    if features.len() != n {
        return Err(Error::Length { expected: n, actual: features.len() });
    }
    let width = features[0].len();
    if let Some(r) = features.iter().find(|r| r.len() != width) {
        return Err(Error::Length { expected: width, actual: r.len() });
    }
    if features.iter().flatten().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("boosting input".into()));
    }

    let sorted: Vec<Vec<usize>> = (0..width)
        .map(|f| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| features[a][f].total_cmp(&features[b][f]).then(a.cmp(&b)));
            idx
        })
        .collect();

    let base = crate::num::mean(targets);
    let mut pred = vec![base; n];
    let mut resid = vec![0.0; n];
    let mut trees = Vec::with_capacity(params.rounds);
    let mut assignment = vec![0usize; n];

    for _ in 0..params.rounds {
        for i in 0..n {
            resid[i] = targets[i] - pred[i];
        }
        let tree = grow_tree(features, &resid, &sorted, &params, &mut assignment);
        for (i, p) in pred.iter_mut().enumerate() {
            *p += tree.predict(&features[i]);
        }
        trees.push(tree);
    }
    Ok(BoostedTrees { base, trees, params })
}

fn grow_tree(
    features: &[Vec<f64>],
    resid: &[f64],
    sorted: &[Vec<usize>],
    params: &BoostParams,
    assignment: &mut [usize],
) -> Tree {
    const NONE: usize = usize::MAX;
    let n = resid.len();
    let mut nodes = vec![Node::Leaf(0.0)];
    assignment.iter_mut().for_each(|a| *a = 0);
    let mut frontier = vec![0usize];

    for _depth in 0..params.max_depth {
        if frontier.is_empty() {
            break;
        }
        // map node id -> frontier slot
        let mut slot = vec![NONE; nodes.len()];
        for (k, &node) in frontier.iter().enumerate() {
            slot[node] = k;
        }
        let mut totals = vec![Stats::default(); frontier.len()];
        for i in 0..n {
            let a = assignment[i];
            if a != NONE && slot[a] != NONE {
                let s = &mut totals[slot[a]];
                s.count += 1;
                s.sum += resid[i];
            }
        }
        let mut best: Vec<Option<BestSplit>> = vec![None; frontier.len()];
        let mut left = vec![Stats::default(); frontier.len()];
        let mut last_value = vec![f64::NAN; frontier.len()];
        for (f, order) in sorted.iter().enumerate() {
            left.iter_mut().for_each(|s| *s = Stats::default());
            last_value.iter_mut().for_each(|v| *v = f64::NAN);
            for &i in order {
                let a = assignment[i];
                if a == NONE || slot[a] == NONE {
                    continue;
                }
                let k = slot[a];
                let x = features[i][f];
                let l = left[k];
                let total = totals[k];
                if l.count >= params.min_leaf && total.count - l.count >= params.min_leaf && x > last_value[k] {
                    let r_sum = total.sum - l.sum;
                    let r_count = total.count - l.count;
                    let gain = l.sum * l.sum / l.count as f64 + r_sum * r_sum / r_count as f64
                        - total.sum * total.sum / total.count as f64;
                    if best[k].map_or(true, |b| gain > b.gain) {
                        best[k] = Some(BestSplit { gain, feature: f, threshold: 0.5 * (last_value[k] + x) });
                    }
                }
                left[k].count += 1;
                left[k].sum += resid[i];
                last_value[k] = x;
            }
        }

        let mut next = Vec::new();
        for (k, &node) in frontier.iter().enumerate() {
            let total = totals[k];
            let tol = 1e-12 * (1.0 + total.sum * total.sum / total.count.max(1) as f64);
            match best[k] {
                Some(b) if b.gain > tol => {
                    let l = nodes.len();
                    nodes.push(Node::Leaf(0.0));
                    nodes.push(Node::Leaf(0.0));
                    nodes[node] = Node::Split { feature: b.feature, threshold: b.threshold, left: l, right: l + 1 };
                    next.push(l);
                    next.push(l + 1);
                }
                _ => {}
            }
        }
        // route rows of split nodes to their children
        for (i, a) in assignment.iter_mut().enumerate() {
            if *a == NONE {
                continue;
            }
            if let Node::Split { feature, threshold, left, right } = &nodes[*a] {
                *a = if features[i][*feature] < *threshold { *left } else { *right };
            }
        }
        frontier = next;
    }

    // leaf values
    let mut sums = vec![Stats::default(); nodes.len()];
    for (i, &a) in assignment.iter().enumerate() {
        if a != NONE {
            sums[a].count += 1;
            sums[a].sum += resid[i];
        }
    }
    for (node, s) in nodes.iter_mut().zip(&sums) {
        if let Node::Leaf(v) = node {
            *v = if s.count > 0 { params.learning_rate * s.sum / s.count as f64 } else { 0.0 };
        }
    }
    Tree { nodes }
}
