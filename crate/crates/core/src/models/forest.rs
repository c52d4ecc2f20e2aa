//! Bagged regression trees on sparse rows.
//!
//! Splits minimize the summed squared error of the children. Features are
//! scanned through the non-zero entries of the node's rows only; all-zero
//! entries form one implicit block, so sparse tf-idf matrices stay cheap.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::features::{CsrMatrix, SparseVec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: usize,
    /// `None` grows until leaves are pure or hit `min_leaf`.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Fraction of columns considered at each split.
    pub feature_frac: f64,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            trees: 100,
            max_depth: None,
            min_leaf: 1,
            feature_frac: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf(f64),
    Split {
        feature: u32,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict_row(&self, row: &SparseVec) -> f64 {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf(v) => return *v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if row.get(*feature) <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<RegressionTree>,
    pub n_features: usize,
}

impl ForestModel {
    pub fn predict_row(&self, row: &SparseVec) -> f64 {
        self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / self.trees.len() as f64
    }
}

pub fn forest_fit(
    x: &CsrMatrix,
    y: &[f64],
    params: &ForestParams,
) -> Result<ForestModel, ModelError> {
    if x.n_rows() != y.len() {
        return Err(ModelError::DimensionMismatch {
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    if y.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    if params.trees == 0
        || params.min_leaf == 0
        || !(params.feature_frac > 0.0 && params.feature_frac <= 1.0)
    {
        return Err(ModelError::InvalidHyper(
            "trees and min_leaf must be >= 1, feature_frac in (0, 1]".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = y.len();
    let trees = (0..params.trees)
        .map(|_| {
            let bootstrap: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let tree_seed = rng.random::<u64>();
            TreeBuilder {
                x,
                y,
                params,
                rng: ChaCha8Rng::seed_from_u64(tree_seed),
                nodes: Vec::new(),
            }
            .build(bootstrap)
        })
        .collect();
    Ok(ForestModel {
        trees,
        n_features: x.n_cols,
    })
}

pub fn forest_predict(model: &ForestModel, x: &CsrMatrix) -> Result<Vec<f64>, ModelError> {
    if x.n_cols != model.n_features {
        return Err(ModelError::DimensionMismatch {
            expected: model.n_features,
            found: x.n_cols,
        });
    }
    Ok(x.rows.iter().map(|r| model.predict_row(r)).collect())
}

struct TreeBuilder<'a> {
    x: &'a CsrMatrix,
    y: &'a [f64],
    params: &'a ForestParams,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

struct Candidate {
    feature: u32,
    threshold: f64,
    sse: f64,
}

impl TreeBuilder<'_> {
    fn build(mut self, rows: Vec<usize>) -> RegressionTree {
        self.grow(rows, 0);
        RegressionTree { nodes: self.nodes }
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let idx = self.nodes.len();
        let mean = rows.iter().map(|&r| self.y[r]).sum::<f64>() / rows.len() as f64;
        self.nodes.push(Node::Leaf(mean));

        let depth_ok = self.params.max_depth.is_none_or(|max| depth < max);
        if !depth_ok || rows.len() < 2 * self.params.min_leaf {
            return idx;
        }
        let Some(best) = self.best_split(&rows) else {
            return idx;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.x.rows[r].get(best.feature) <= best.threshold);
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[idx] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: l,
            right: r,
        };
        idx
    }

    fn best_split(&mut self, rows: &[usize]) -> Option<Candidate> {
        let n = rows.len() as f64;
        let total: f64 = rows.iter().map(|&r| self.y[r]).sum();
        let total_sq: f64 = rows.iter().map(|&r| self.y[r] * self.y[r]).sum();
        let parent_sse = total_sq - total * total / n;
        if parent_sse <= 1e-12 {
            return None;
        }

        // Non-zero entries per feature among this node's rows.
        let mut columns: BTreeMap<u32, Vec<(f64, f64)>> = BTreeMap::new();
        for &r in rows {
            let row = &self.x.rows[r];
            for (&j, &v) in row.indices.iter().zip(&row.values) {
                if v != 0.0 {
                    columns.entry(j).or_default().push((v, self.y[r]));
                }
            }
        }
        let mut features: Vec<u32> = columns.keys().copied().collect();
        if self.params.feature_frac < 1.0 && !features.is_empty() {
            // Subsample among all columns, then keep the populated ones.
            let k = ((self.x.n_cols as f64 * self.params.feature_frac).ceil() as usize)
                .clamp(1, self.x.n_cols);
            let mut chosen: Vec<u32> = sample(&mut self.rng, self.x.n_cols, k)
                .into_iter()
                .map(|j| j as u32)
                .collect();
            chosen.sort_unstable();
            features.retain(|f| chosen.binary_search(f).is_ok());
        }

        let min_leaf = self.params.min_leaf as f64;
        let mut best: Option<Candidate> = None;
        for feature in features {
            let entries = columns.get_mut(&feature).expect("feature present");
            entries.sort_by(|a, b| a.0.total_cmp(&b.0));
            let nz_count = entries.len() as f64;
            let nz_sum: f64 = entries.iter().map(|e| e.1).sum();
            let nz_sq: f64 = entries.iter().map(|e| e.1 * e.1).sum();
            let zeros = n - nz_count;

            // Ordered blocks of equal value; zeros sit between negatives and
            // positives.
            let mut blocks: Vec<(f64, f64, f64, f64)> = Vec::new(); // value, count, sum, sq
            let mut push = |value: f64, y: f64, count: f64, sq: f64| match blocks.last_mut() {
                Some(last) if last.0 == value => {
                    last.1 += count;
                    last.2 += y;
                    last.3 += sq;
                }
                _ => blocks.push((value, count, y, sq)),
            };
            let mut zero_pushed = zeros == 0.0;
            for &(v, yv) in entries.iter() {
                if !zero_pushed && v > 0.0 {
                    push(0.0, total - nz_sum, zeros, total_sq - nz_sq);
                    zero_pushed = true;
                }
                push(v, yv, 1.0, yv * yv);
            }
            if !zero_pushed {
                push(0.0, total - nz_sum, zeros, total_sq - nz_sq);
            }

            let (mut lc, mut ls, mut lq) = (0.0, 0.0, 0.0);
            for w in 0..blocks.len().saturating_sub(1) {
                lc += blocks[w].1;
                ls += blocks[w].2;
                lq += blocks[w].3;
                let rc = n - lc;
                if lc < min_leaf || rc < min_leaf {
                    continue;
                }
                let rs = total - ls;
                let rq = total_sq - lq;
                let sse = (lq - ls * ls / lc) + (rq - rs * rs / rc);
                if best.as_ref().is_none_or(|b| sse < b.sse - 1e-12) {
                    best = Some(Candidate {
                        feature,
                        threshold: 0.5 * (blocks[w].0 + blocks[w + 1].0),
                        sse,
                    });
                }
            }
        }
        best.filter(|b| b.sse < parent_sse - 1e-12)
    }
}
