//! Feature assembly and cross-validated group classification.
//!
//! Each participant is represented by 12 scores in a fixed order: the
//! two modifier-similarity scores, then the five all-words derailment
//! scores (k = 1..5), then the five content-words derailment scores.
//! Missing scores are imputed with the across-participant mean of the
//! defined values and flagged in the imputation mask.
//!
//! Evaluation is stratified k-fold cross-validation with a seeded RNG;
//! identical inputs, seed, and hyperparameters reproduce the report
//! byte for byte. Headline metrics are pooled over folds (every
//! participant is predicted exactly once); per-fold and fold-averaged
//! metrics are reported alongside. Precision and recall target the
//! patient class.

mod forest;
mod gbt;
mod svm;
mod tree;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::Group;
use crate::derailment::WordFilter;

use forest::RandomForest;
use gbt::GradientBoostedTrees;
use svm::LinearSvm;

pub const N_FEATURES: usize = 12;

/// Feature names in their fixed vector order.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "adj_similarity",
    "adv_similarity",
    "derail_all_k1",
    "derail_all_k2",
    "derail_all_k3",
    "derail_all_k4",
    "derail_all_k5",
    "derail_content_k1",
    "derail_content_k2",
    "derail_content_k3",
    "derail_content_k4",
    "derail_content_k5",
];

/// Vector index of a derailment feature.
pub fn derailment_feature_index(filter: WordFilter, k: usize) -> usize {
    debug_assert!((1..=5).contains(&k));
    match filter {
        WordFilter::AllWords => 1 + k,
        WordFilter::ContentOnly => 6 + k,
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("no participants to classify")]
    EmptyInput,
    #[error("feature {0} is undefined for every participant")]
    FeatureAllMissing(&'static str),
    #[error("need at least 2 folds, got {0}")]
    TooFewFolds(usize),
    #[error("{k_folds} folds exceed the {n} available samples")]
    TooManySamples { k_folds: usize, n: usize },
    #[error("classification needs both groups present in the data")]
    SingleClass,
}

/// The raw per-participant scores the pipeline hands over, possibly
/// with gaps. Derailment slots are indexed k-1 for k = 1..5.
#[derive(Debug, Clone)]
pub struct ParticipantScoreSet {
    pub participant_id: String,
    pub label: Group,
    pub adj_similarity: Option<f64>,
    pub adv_similarity: Option<f64>,
    pub derail_all: [Option<f64>; 5],
    pub derail_content: [Option<f64>; 5],
}

impl ParticipantScoreSet {
    pub fn new(participant_id: impl Into<String>, label: Group) -> Self {
        Self {
            participant_id: participant_id.into(),
            label,
            adj_similarity: None,
            adv_similarity: None,
            derail_all: [None; 5],
            derail_content: [None; 5],
        }
    }

    fn feature(&self, index: usize) -> Option<f64> {
        match index {
            0 => self.adj_similarity,
            1 => self.adv_similarity,
            2..=6 => self.derail_all[index - 2],
            7..=11 => self.derail_content[index - 7],
            _ => unreachable!("feature index out of range"),
        }
    }
}

/// One participant's completed feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub participant_id: String,
    pub label: Group,
    pub features: [f64; N_FEATURES],
    pub imputed_mask: [bool; N_FEATURES],
}

/// Completes the score sets into feature vectors with mean imputation.
///
/// A feature that is undefined for every participant cannot be imputed
/// and is a configuration error, reported by name.
pub fn build_feature_vectors(
    scores: &[ParticipantScoreSet],
) -> Result<Vec<FeatureVector>, ClassifyError> {
    if scores.is_empty() {
        return Err(ClassifyError::EmptyInput);
    }
    let mut means = [0.0; N_FEATURES];
    for (index, mean) in means.iter_mut().enumerate() {
        let defined: Vec<f64> = scores.iter().filter_map(|s| s.feature(index)).collect();
        if defined.is_empty() {
            return Err(ClassifyError::FeatureAllMissing(FEATURE_NAMES[index]));
        }
        *mean = defined.iter().sum::<f64>() / defined.len() as f64;
    }
    Ok(scores
        .iter()
        .map(|s| {
            let mut features = [0.0; N_FEATURES];
            let mut imputed_mask = [false; N_FEATURES];
            for index in 0..N_FEATURES {
                match s.feature(index) {
                    Some(v) => features[index] = v,
                    None => {
                        features[index] = means[index];
                        imputed_mask[index] = true;
                    }
                }
            }
            FeatureVector {
                participant_id: s.participant_id.clone(),
                label: s.label,
                features,
                imputed_mask,
            }
        })
        .collect())
}

/// One cross-validation fold: disjoint train/test index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Deterministic stratified folds.
///
/// Members of each class are shuffled with the seeded RNG and dealt
/// round-robin across folds through a shared cursor, so per-fold class
/// counts stay within one member of the global proportions and fold
/// sizes stay balanced. Classes smaller than the fold count simply
/// leave some folds without that class.
pub fn stratified_folds(
    labels: &[Group],
    k_folds: usize,
    seed: u64,
) -> Result<Vec<Fold>, ClassifyError> {
    if k_folds < 2 {
        return Err(ClassifyError::TooFewFolds(k_folds));
    }
    if k_folds > labels.len() {
        return Err(ClassifyError::TooManySamples {
            k_folds,
            n: labels.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test_sets: Vec<Vec<usize>> = vec![Vec::new(); k_folds];
    let mut cursor = 0usize;
    for class in [Group::Control, Group::Patient] {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == class)
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut rng);
        for index in members {
            test_sets[cursor % k_folds].push(index);
            cursor += 1;
        }
    }
    Ok(test_sets
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let train: Vec<usize> = (0..labels.len()).filter(|i| !test.contains(i)).collect();
            Fold { train, test }
        })
        .collect())
}

/// The classifier families under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    RandomForest,
    GradientBoostedTrees,
    LinearSvm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [
        ClassifierKind::RandomForest,
        ClassifierKind::GradientBoostedTrees,
        ClassifierKind::LinearSvm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::RandomForest => "random_forest",
            ClassifierKind::GradientBoostedTrees => "gradient_boosted_trees",
            ClassifierKind::LinearSvm => "linear_svm",
        }
    }

    fn is_tree_ensemble(self) -> bool {
        !matches!(self, ClassifierKind::LinearSvm)
    }
}

/// Training hyperparameters, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperparams {
    pub rf_trees: usize,
    /// None = grow until pure.
    pub rf_max_depth: Option<usize>,
    pub gbt_rounds: usize,
    pub gbt_depth: usize,
    pub gbt_learning_rate: f64,
    /// Fraction of features drawn per boosting round; 1.0 disables
    /// column sampling entirely.
    pub gbt_feature_subsample: f64,
    pub svm_c: f64,
    pub svm_epochs: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            rf_trees: 200,
            rf_max_depth: None,
            gbt_rounds: 100,
            gbt_depth: 3,
            gbt_learning_rate: 0.1,
            gbt_feature_subsample: 0.7,
            svm_c: 1.0,
            svm_epochs: 2000,
        }
    }
}

/// Metrics of a single fold. Precision/recall are None when the fold
/// has no predicted (resp. actual) patients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldMetrics {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub test_size: usize,
}

/// Mean of the per-fold metrics, skipping folds where a metric is
/// undefined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldAveragedMetrics {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

/// Full cross-validation report for one classifier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub classifier: ClassifierKind,
    /// Pooled over folds; the headline numbers.
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub fold_averaged: FoldAveragedMetrics,
    pub per_fold: Vec<FoldMetrics>,
    /// (feature index, importance) sorted by descending importance, for
    /// the tree ensembles; importances are normalized to sum to 1.
    pub importances: Option<Vec<(usize, f64)>>,
    pub folds: usize,
    pub seed: u64,
    pub hyperparams: Hyperparams,
}

enum Model {
    Forest(RandomForest),
    Boosted(GradientBoostedTrees),
    Svm(LinearSvm),
}

impl Model {
    fn predict(&self, row: &[f64]) -> usize {
        match self {
            Model::Forest(m) => m.predict(row),
            Model::Boosted(m) => m.predict(row),
            Model::Svm(m) => m.predict(row),
        }
    }
}

/// Trains and evaluates one classifier family under stratified k-fold
/// cross-validation.
pub fn train_eval(
    kind: ClassifierKind,
    vectors: &[FeatureVector],
    k_folds: usize,
    seed: u64,
    params: &Hyperparams,
) -> Result<CvReport, ClassifyError> {
    if vectors.is_empty() {
        return Err(ClassifyError::EmptyInput);
    }
    let labels: Vec<Group> = vectors.iter().map(|v| v.label).collect();
    if labels.iter().all(|l| *l == labels[0]) {
        return Err(ClassifyError::SingleClass);
    }
    let folds = stratified_folds(&labels, k_folds, seed)?;
    // Decoupled stream for per-fold model seeds, so the forest draws do
    // not depend on fold membership order.
    let mut seeder = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);

    let mut pooled = Confusion::default();
    let mut per_fold = Vec::with_capacity(folds.len());
    let mut importance_sum = [0.0; N_FEATURES];
    let mut importance_folds = 0usize;

    for fold in &folds {
        let fold_seed = seeder.next_u64();
        let train_x: Vec<Vec<f64>> = fold
            .train
            .iter()
            .map(|&i| vectors[i].features.to_vec())
            .collect();
        let train_y: Vec<usize> = fold
            .train
            .iter()
            .map(|&i| (labels[i] == Group::Patient) as usize)
            .collect();

        let model = match kind {
            ClassifierKind::RandomForest => Model::Forest(RandomForest::fit(
                &train_x,
                &train_y,
                params.rf_trees,
                params.rf_max_depth,
                fold_seed,
            )),
            ClassifierKind::GradientBoostedTrees => Model::Boosted(GradientBoostedTrees::fit(
                &train_x,
                &train_y,
                params.gbt_rounds,
                params.gbt_depth,
                params.gbt_learning_rate,
                params.gbt_feature_subsample,
                fold_seed,
            )),
            ClassifierKind::LinearSvm => Model::Svm(LinearSvm::fit(
                &train_x,
                &train_y,
                params.svm_c,
                params.svm_epochs,
            )),
        };

        if let Some(imp) = match &model {
            Model::Forest(m) => Some(m.importances()),
            Model::Boosted(m) => Some(m.importances()),
            Model::Svm(_) => None,
        } {
            for (sum, v) in importance_sum.iter_mut().zip(imp) {
                *sum += v;
            }
            importance_folds += 1;
        }

        let mut fold_confusion = Confusion::default();
        for &i in &fold.test {
            let predicted = model.predict(&vectors[i].features);
            let actual = (labels[i] == Group::Patient) as usize;
            fold_confusion.record(actual, predicted);
        }
        pooled.merge(&fold_confusion);
        per_fold.push(FoldMetrics {
            accuracy: fold_confusion.accuracy(),
            precision: fold_confusion.precision(),
            recall: fold_confusion.recall(),
            test_size: fold.test.len(),
        });
    }

    let importances = if kind.is_tree_ensemble() && importance_folds > 0 {
        let mut pairs: Vec<(usize, f64)> = importance_sum
            .iter()
            .map(|v| v / importance_folds as f64)
            .enumerate()
            .collect();
        let total: f64 = pairs.iter().map(|(_, v)| v).sum();
        if total > 0.0 {
            for (_, v) in &mut pairs {
                *v /= total;
            }
        }
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        Some(pairs)
    } else {
        None
    };

    let mean_over = |extract: fn(&FoldMetrics) -> Option<f64>| {
        let defined: Vec<f64> = per_fold.iter().filter_map(extract).collect();
        if defined.is_empty() {
            None
        } else {
            Some(defined.iter().sum::<f64>() / defined.len() as f64)
        }
    };
    let fold_averaged = FoldAveragedMetrics {
        accuracy: per_fold.iter().map(|f| f.accuracy).sum::<f64>() / per_fold.len() as f64,
        precision: mean_over(|f| f.precision),
        recall: mean_over(|f| f.recall),
    };

    Ok(CvReport {
        classifier: kind,
        accuracy: pooled.accuracy(),
        precision: pooled.precision().unwrap_or(0.0),
        recall: pooled.recall().unwrap_or(0.0),
        fold_averaged,
        per_fold,
        importances,
        folds: k_folds,
        seed,
        hyperparams: params.clone(),
    })
}

// Binary confusion counts with patient (= 1) as the positive class.
#[derive(Debug, Default, Clone)]
struct Confusion {
    tp: usize,
    fp: usize,
    tn: usize,
    fn_: usize,
}

impl Confusion {
    fn record(&mut self, actual: usize, predicted: usize) {
        match (actual, predicted) {
            (1, 1) => self.tp += 1,
            (0, 1) => self.fp += 1,
            (0, 0) => self.tn += 1,
            (1, 0) => self.fn_ += 1,
            _ => unreachable!("binary labels"),
        }
    }

    fn merge(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }

    fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    fn precision(&self) -> Option<f64> {
        let denom = self.tp + self.fp;
        (denom > 0).then(|| self.tp as f64 / denom as f64)
    }

    fn recall(&self) -> Option<f64> {
        let denom = self.tp + self.fn_;
        (denom > 0).then(|| self.tp as f64 / denom as f64)
    }
}
