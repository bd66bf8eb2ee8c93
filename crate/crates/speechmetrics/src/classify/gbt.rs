//! Gradient-boosted trees for binary logistic loss.
//!
//! Newton boosting: each round fits a shallow regression tree to the
//! residuals y - p with hessians p(1 - p), and the score advances by the
//! learning rate. Each round draws a column subsample (seeded), which
//! spreads split gain across redundant informative features instead of
//! letting the greedy search ride a single one; a subsample fraction of
//! 1.0 restores the fully deterministic all-feature search.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tree::{fit_regression, Tree};

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

pub(crate) struct GradientBoostedTrees {
    base: f64,
    learning_rate: f64,
    trees: Vec<Tree>,
    importances: Vec<f64>,
}

impl GradientBoostedTrees {
    pub(crate) fn fit(
        x: &[Vec<f64>],
        y: &[usize],
        rounds: usize,
        depth: usize,
        learning_rate: f64,
        feature_subsample: f64,
        seed: u64,
    ) -> Self {
        let n = x.len();
        let d = x[0].len();
        let m = ((d as f64 * feature_subsample).round() as usize).clamp(1, d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positive = y.iter().sum::<usize>() as f64 / n as f64;
        let prior = positive.clamp(1e-6, 1.0 - 1e-6);
        let base = (prior / (1.0 - prior)).ln();

        let mut scores = vec![base; n];
        let mut importances = vec![0.0; d];
        let mut trees = Vec::with_capacity(rounds);
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        for _ in 0..rounds {
            for i in 0..n {
                let p = sigmoid(scores[i]);
                grad[i] = y[i] as f64 - p;
                hess[i] = p * (1.0 - p);
            }
            let columns: Vec<usize> = if m == d {
                (0..d).collect()
            } else {
                let mut sampled: Vec<usize> = rand::seq::index::sample(&mut rng, d, m)
                    .into_iter()
                    .collect();
                sampled.sort_unstable();
                sampled
            };
            let tree = fit_regression(x, &grad, &hess, depth, &columns, &mut importances);
            for (score, row) in scores.iter_mut().zip(x) {
                *score += learning_rate * tree.predict(row);
            }
            trees.push(tree);
        }
        let total: f64 = importances.iter().sum();
        if total > 0.0 {
            for v in &mut importances {
                *v /= total;
            }
        }
        Self {
            base,
            learning_rate,
            trees,
            importances,
        }
    }

    pub(crate) fn predict(&self, row: &[f64]) -> usize {
        let score =
            self.base + self.learning_rate * self.trees.iter().map(|t| t.predict(row)).sum::<f64>();
        usize::from(sigmoid(score) > 0.5)
    }

    /// Per-feature split gain, normalized to sum to 1.
    pub(crate) fn importances(&self) -> &[f64] {
        &self.importances
    }
}
