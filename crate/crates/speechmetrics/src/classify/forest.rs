//! Random forest: bagged classification trees with per-split feature
//! sampling and majority voting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tree::{fit_classification, Tree};

pub(crate) struct RandomForest {
    trees: Vec<Tree>,
    importances: Vec<f64>,
}

impl RandomForest {
    pub(crate) fn fit(
        x: &[Vec<f64>],
        y: &[usize],
        n_trees: usize,
        max_depth: Option<usize>,
        seed: u64,
    ) -> Self {
        let n = x.len();
        let d = x[0].len();
        let m_features = (d as f64).sqrt().floor().max(1.0) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut importances = vec![0.0; d];
        let trees = (0..n_trees)
            .map(|_| {
                let bootstrap: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                fit_classification(
                    x,
                    y,
                    bootstrap,
                    max_depth,
                    m_features,
                    &mut rng,
                    &mut importances,
                )
            })
            .collect();
        let total: f64 = importances.iter().sum();
        if total > 0.0 {
            for v in &mut importances {
                *v /= total;
            }
        }
        Self { trees, importances }
    }

    /// Majority vote over trees; ties go to class 0.
    pub(crate) fn predict(&self, row: &[f64]) -> usize {
        let ones = self.trees.iter().filter(|t| t.predict(row) >= 0.5).count();
        usize::from(2 * ones > self.trees.len())
    }

    /// Per-feature impurity decrease, normalized to sum to 1 (all zero
    /// when no tree ever split).
    pub(crate) fn importances(&self) -> &[f64] {
        &self.importances
    }
}
