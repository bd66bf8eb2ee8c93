//! Run configuration: command-line flags merged over an optional JSON
//! config file, with flags winning. The default seed can be overridden
//! through the `SPEECHMETRICS_SEED` environment variable (flags and
//! config still take precedence over it).

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Deserialize;

use speechmetrics::classify::ClassifierKind;
use speechmetrics::derailment::{WordFilter, DEFAULT_MIN_WORDS, DEFAULT_QUESTIONS};

pub const SEED_ENV_VAR: &str = "SPEECHMETRICS_SEED";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterArg {
    All,
    Content,
}

impl From<FilterArg> for WordFilter {
    fn from(arg: FilterArg) -> Self {
        match arg {
            FilterArg::All => WordFilter::AllWords,
            FilterArg::Content => WordFilter::ContentOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierArg {
    RandomForest,
    GradientBoostedTrees,
    LinearSvm,
}

impl From<ClassifierArg> for ClassifierKind {
    fn from(arg: ClassifierArg) -> Self {
        match arg {
            ClassifierArg::RandomForest => ClassifierKind::RandomForest,
            ClassifierArg::GradientBoostedTrees => ClassifierKind::GradientBoostedTrees,
            ClassifierArg::LinearSvm => ClassifierKind::LinearSvm,
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the
/// config file, then to defaults.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// CoNLL-U transcript corpus.
    #[arg(long)]
    pub transcripts: Option<PathBuf>,

    /// Word-vector file (optional "count dim" header, one word per line).
    #[arg(long)]
    pub vectors: Option<PathBuf>,

    /// Reference corpus in CoNLL-U, one document per doc_id block.
    /// Repeatable; statistics merge across files.
    #[arg(long)]
    pub reference: Vec<PathBuf>,

    /// Question ids to score (derailment only). Default: 1,2,3,4.
    #[arg(long, value_delimiter = ',')]
    pub questions: Option<Vec<String>>,

    /// Minimum preprocessed word count for a response to be scored.
    #[arg(long)]
    pub min_words: Option<usize>,

    /// Derailment window widths. Default: 1,2,3,4,5.
    #[arg(long = "k", value_delimiter = ',')]
    pub k_values: Option<Vec<usize>>,

    /// Word filters to score under. Default: all,content.
    #[arg(long = "filter", value_delimiter = ',')]
    pub filters: Option<Vec<FilterArg>>,

    /// Classifier families to evaluate. Default: all three.
    #[arg(long = "classifier", value_delimiter = ',')]
    pub classifiers: Option<Vec<ClassifierArg>>,

    /// Cross-validation fold count.
    #[arg(long)]
    pub folds: Option<usize>,

    /// RNG seed for fold assignment and tree training.
    #[arg(long)]
    pub seed: Option<u64>,

    /// JSON config file; explicit flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Config-file counterpart of the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    transcripts: Option<PathBuf>,
    vectors: Option<PathBuf>,
    reference: Option<Vec<PathBuf>>,
    questions: Option<Vec<String>>,
    min_words: Option<usize>,
    k: Option<Vec<usize>>,
    filters: Option<Vec<FilterArg>>,
    classifiers: Option<Vec<ClassifierArg>>,
    folds: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub transcripts: PathBuf,
    pub vectors: PathBuf,
    pub reference: Vec<PathBuf>,
    pub questions: Vec<String>,
    pub min_words: usize,
    pub k_values: Vec<usize>,
    pub filters: Vec<WordFilter>,
    pub classifiers: Vec<ClassifierKind>,
    pub folds: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn question_set(&self) -> HashSet<String> {
        self.questions.iter().cloned().collect()
    }
}

fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("cannot parse config file {}", path.display()))
}

fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV_VAR) {
        Ok(raw) => {
            let seed = raw
                .parse::<u64>()
                .with_context(|| format!("{SEED_ENV_VAR}={raw} is not a valid seed"))?;
            Ok(Some(seed))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(err) => Err(err).context(SEED_ENV_VAR),
    }
}

pub fn resolve(args: &CommonArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };

    let transcripts = args
        .transcripts
        .clone()
        .or(file.transcripts)
        .context("no transcripts path: pass --transcripts or set it in the config file")?;
    let vectors = args
        .vectors
        .clone()
        .or(file.vectors)
        .context("no vectors path: pass --vectors or set it in the config file")?;
    let out = args
        .out
        .clone()
        .or(file.out)
        .context("no output directory: pass --out or set it in the config file")?;

    let reference = if args.reference.is_empty() {
        file.reference.unwrap_or_default()
    } else {
        args.reference.clone()
    };
    let questions = args
        .questions
        .clone()
        .or(file.questions)
        .unwrap_or_else(|| DEFAULT_QUESTIONS.iter().map(|q| q.to_string()).collect());
    let min_words = args
        .min_words
        .or(file.min_words)
        .unwrap_or(DEFAULT_MIN_WORDS);
    let k_values = args
        .k_values
        .clone()
        .or(file.k)
        .unwrap_or_else(|| vec![1, 2, 3, 4, 5]);
    let filters: Vec<WordFilter> = args
        .filters
        .clone()
        .or(file.filters)
        .map(|list| list.into_iter().map(WordFilter::from).collect())
        .unwrap_or_else(|| vec![WordFilter::AllWords, WordFilter::ContentOnly]);
    let classifiers: Vec<ClassifierKind> = args
        .classifiers
        .clone()
        .or(file.classifiers)
        .map(|list| list.into_iter().map(ClassifierKind::from).collect())
        .unwrap_or_else(|| ClassifierKind::ALL.to_vec());
    let folds = args.folds.or(file.folds).unwrap_or(DEFAULT_FOLDS);
    let seed = match args.seed.or(file.seed) {
        Some(seed) => seed,
        None => seed_from_env()?.unwrap_or(DEFAULT_SEED),
    };

    if k_values.is_empty() {
        bail!("the window-width list cannot be empty");
    }
    if let Some(bad) = k_values.iter().find(|k| **k == 0) {
        bail!("window width must be at least 1, got {bad}");
    }
    if filters.is_empty() {
        bail!("the filter list cannot be empty");
    }
    if folds < 2 {
        bail!("need at least 2 folds, got {folds}");
    }

    Ok(RunConfig {
        transcripts,
        vectors,
        reference,
        questions,
        min_words,
        k_values,
        filters,
        classifiers,
        folds,
        seed,
        out,
    })
}
