//! CART-style trees used by the ensemble classifiers.
//!
//! Splits are axis-aligned thresholds at midpoints between distinct
//! sorted feature values. Ties are broken by candidate order, which is
//! fixed by the caller (or its seeded RNG), so training is deterministic.

use rand::Rng;

const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub(crate) fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Candidate {
    // Canonical ordering: highest gain wins, exact gain ties go to the
    // lowest threshold so the choice does not depend on feature order.
    fn beats(&self, best: &Option<Candidate>) -> bool {
        match best {
            None => self.gain > MIN_GAIN,
            Some(b) => self.gain > b.gain || (self.gain == b.gain && self.threshold < b.threshold),
        }
    }
}

fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

/// Grows a binary classification tree on the bootstrap sample `samples`
/// (indices into `x`, repeats allowed). At each node `m_features`
/// candidate features are drawn from `rng`. Impurity decreases are
/// accumulated into `importances`, weighted by node size.
pub(crate) fn fit_classification<R: Rng>(
    x: &[Vec<f64>],
    y: &[usize],
    samples: Vec<usize>,
    max_depth: Option<usize>,
    m_features: usize,
    rng: &mut R,
    importances: &mut [f64],
) -> Tree {
    let n_total = samples.len() as f64;
    let mut tree = Tree { nodes: Vec::new() };
    grow_classification(
        x,
        y,
        samples,
        0,
        max_depth,
        m_features,
        rng,
        importances,
        n_total,
        &mut tree.nodes,
    );
    tree
}

#[allow(clippy::too_many_arguments)]
fn grow_classification<R: Rng>(
    x: &[Vec<f64>],
    y: &[usize],
    samples: Vec<usize>,
    depth: usize,
    max_depth: Option<usize>,
    m_features: usize,
    rng: &mut R,
    importances: &mut [f64],
    n_total: f64,
    nodes: &mut Vec<Node>,
) -> usize {
    let mut counts = [0usize; 2];
    for &i in &samples {
        counts[y[i]] += 1;
    }
    let majority = if counts[1] > counts[0] { 1.0 } else { 0.0 };

    let depth_reached = max_depth.is_some_and(|d| depth >= d);
    if counts[0] == 0 || counts[1] == 0 || samples.len() < 2 || depth_reached {
        nodes.push(Node::Leaf { value: majority });
        return nodes.len() - 1;
    }

    let d = x[0].len();
    let parent_gini = gini(counts);
    let n_node = samples.len() as f64;
    let mut best: Option<Candidate> = None;

    for feature in rand::seq::index::sample(rng, d, m_features.min(d)) {
        let mut vals: Vec<(f64, usize)> = samples.iter().map(|&i| (x[i][feature], y[i])).collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total1 = counts[1];
        let mut left = [0usize; 2];
        for i in 0..vals.len() - 1 {
            left[vals[i].1] += 1;
            if vals[i + 1].0 <= vals[i].0 {
                continue;
            }
            let nl = (i + 1) as f64;
            let nr = n_node - nl;
            let right = [counts[0] - left[0], total1 - left[1]];
            let gain = parent_gini - (nl / n_node) * gini(left) - (nr / n_node) * gini(right);
            let candidate = Candidate {
                feature,
                threshold: (vals[i].0 + vals[i + 1].0) / 2.0,
                gain,
            };
            if candidate.beats(&best) {
                best = Some(candidate);
            }
        }
    }

    let Some(split) = best else {
        nodes.push(Node::Leaf { value: majority });
        return nodes.len() - 1;
    };

    importances[split.feature] += (n_node / n_total) * split.gain;
    let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = samples
        .into_iter()
        .partition(|&i| x[i][split.feature] <= split.threshold);

    let at = nodes.len();
    nodes.push(Node::Leaf { value: majority }); // placeholder
    let left = grow_classification(
        x,
        y,
        left_samples,
        depth + 1,
        max_depth,
        m_features,
        rng,
        importances,
        n_total,
        nodes,
    );
    let right = grow_classification(
        x,
        y,
        right_samples,
        depth + 1,
        max_depth,
        m_features,
        rng,
        importances,
        n_total,
        nodes,
    );
    nodes[at] = Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left,
        right,
    };
    at
}

/// Grows a regression tree on gradient/hessian pairs, XGBoost-style:
/// split gain is GL^2/HL + GR^2/HR - G^2/H and each leaf takes the
/// Newton step G/H. Candidate features are restricted to `columns`
/// (pass the full range for deterministic all-feature search).
pub(crate) fn fit_regression(
    x: &[Vec<f64>],
    grad: &[f64],
    hess: &[f64],
    max_depth: usize,
    columns: &[usize],
    importances: &mut [f64],
) -> Tree {
    let samples: Vec<usize> = (0..grad.len()).collect();
    let mut tree = Tree { nodes: Vec::new() };
    grow_regression(
        x,
        grad,
        hess,
        samples,
        0,
        max_depth,
        columns,
        importances,
        &mut tree.nodes,
    );
    tree
}

#[allow(clippy::too_many_arguments)]
fn grow_regression(
    x: &[Vec<f64>],
    grad: &[f64],
    hess: &[f64],
    samples: Vec<usize>,
    depth: usize,
    max_depth: usize,
    columns: &[usize],
    importances: &mut [f64],
    nodes: &mut Vec<Node>,
) -> usize {
    const EPS: f64 = 1e-12;
    let g: f64 = samples.iter().map(|&i| grad[i]).sum();
    let h: f64 = samples.iter().map(|&i| hess[i]).sum();
    let leaf_value = g / (h + EPS);

    if depth >= max_depth || samples.len() < 2 {
        nodes.push(Node::Leaf { value: leaf_value });
        return nodes.len() - 1;
    }

    let parent_score = g * g / (h + EPS);
    let mut best: Option<Candidate> = None;

    for &feature in columns {
        let mut vals: Vec<(f64, f64, f64)> = samples
            .iter()
            .map(|&i| (x[i][feature], grad[i], hess[i]))
            .collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut gl = 0.0;
        let mut hl = 0.0;
        for i in 0..vals.len() - 1 {
            gl += vals[i].1;
            hl += vals[i].2;
            if vals[i + 1].0 <= vals[i].0 {
                continue;
            }
            let gr = g - gl;
            let hr = h - hl;
            if hl < EPS || hr < EPS {
                continue;
            }
            let gain = gl * gl / (hl + EPS) + gr * gr / (hr + EPS) - parent_score;
            let candidate = Candidate {
                feature,
                threshold: (vals[i].0 + vals[i + 1].0) / 2.0,
                gain,
            };
            if candidate.beats(&best) {
                best = Some(candidate);
            }
        }
    }

    let Some(split) = best else {
        nodes.push(Node::Leaf { value: leaf_value });
        return nodes.len() - 1;
    };

    importances[split.feature] += split.gain;
    let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = samples
        .into_iter()
        .partition(|&i| x[i][split.feature] <= split.threshold);

    let at = nodes.len();
    nodes.push(Node::Leaf { value: leaf_value });
    let left = grow_regression(
        x,
        grad,
        hess,
        left_samples,
        depth + 1,
        max_depth,
        columns,
        importances,
        nodes,
    );
    let right = grow_regression(
        x,
        grad,
        hess,
        right_samples,
        depth + 1,
        max_depth,
        columns,
        importances,
        nodes,
    );
    nodes[at] = Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left,
        right,
    };
    at
}
