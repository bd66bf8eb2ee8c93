//! Windowed derailment scoring.
//!
//! Each word of a response is compared to the `k` words that follow it;
//! the word's score is the mean cosine similarity over those pairs, and
//! the response score is the mean over words. Low scores indicate speech
//! that drifts between weakly related topics. Words without a vector
//! (and zero-norm vectors) are transparent: pairs involving them are
//! skipped rather than scored.

use std::collections::HashSet;

use thiserror::Error;

use crate::corpus::{self, Group, Participant, Token, TranscriptCorpus};
use crate::embeddings::{self, EmbeddingTable};
use crate::stats::{self, StatsError};

/// POS tags retained by the content-word filter.
pub const CONTENT_TAGS: [&str; 4] = ["NOUN", "VERB", "ADJ", "ADV"];

/// Word-count threshold below which a response is too short to score.
pub const DEFAULT_MIN_WORDS: usize = 50;

/// The open-ended interview questions scored by default.
pub const DEFAULT_QUESTIONS: [&str; 4] = ["1", "2", "3", "4"];

/// Which tokens of a response participate in scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WordFilter {
    AllWords,
    ContentOnly,
}

impl WordFilter {
    pub fn as_str(self) -> &'static str {
        match self {
            WordFilter::AllWords => "all",
            WordFilter::ContentOnly => "content",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DerailmentConfig {
    /// Window width: how many following words each word is compared to.
    pub k: usize,
    pub word_filter: WordFilter,
    pub min_words: usize,
    pub questions: HashSet<String>,
}

impl DerailmentConfig {
    pub fn new(k: usize, word_filter: WordFilter) -> Self {
        assert!(k >= 1, "window width must be at least 1");
        Self {
            k,
            word_filter,
            min_words: DEFAULT_MIN_WORDS,
            questions: DEFAULT_QUESTIONS.iter().map(|q| q.to_string()).collect(),
        }
    }
}

/// One participant's mean derailment score for a (k, filter) setting.
#[derive(Debug, Clone, PartialEq)]
pub struct DerailmentScore {
    pub participant_id: String,
    pub k: usize,
    pub filter: WordFilter,
    pub value: f64,
    /// Responses that produced a defined score.
    pub n_responses: usize,
}

/// Group-level summary behind one comparison row.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupComparison {
    pub control_mean: f64,
    pub control_sd: f64,
    pub patient_mean: f64,
    pub patient_sd: f64,
    pub t: f64,
    pub p: f64,
}

#[derive(Debug, Error)]
pub enum DerailmentError {
    #[error("{group} group has {n} scored participants; need at least 2")]
    InsufficientData { group: Group, n: usize },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Keeps only content words (nouns, verbs, adjectives, adverbs); the
/// all-words mode returns the input unchanged.
pub fn content_filter<'a>(tokens: &[&'a Token], filter: WordFilter) -> Vec<&'a Token> {
    match filter {
        WordFilter::AllWords => tokens.to_vec(),
        WordFilter::ContentOnly => tokens
            .iter()
            .filter(|t| CONTENT_TAGS.contains(&t.upos.as_str()))
            .copied()
            .collect(),
    }
}

/// Scores one response from its already-preprocessed, filtered token
/// sequence (sentences concatenated in order).
///
/// Word i's score is the mean cosine between it and words i+1..=i+k
/// (truncated at the end of the response), skipping pairs where either
/// word has no usable vector. The response score is the unweighted mean
/// of the defined word scores; `None` when no word score is defined.
pub fn response_derailment(tokens: &[&Token], table: &EmbeddingTable, k: usize) -> Option<f64> {
    assert!(k >= 1, "window width must be at least 1");
    let vectors: Vec<Option<&[f64]>> = tokens
        .iter()
        .map(|t| {
            table
                .lookup(&t.form)
                .filter(|v| !embeddings::is_zero_norm(v))
        })
        .collect();

    let mut word_scores = Vec::new();
    for (i, vi) in vectors.iter().enumerate() {
        let Some(vi) = vi else { continue };
        let mut pair_sum = 0.0;
        let mut pairs = 0usize;
        for vj in vectors.iter().skip(i + 1).take(k).flatten() {
            pair_sum += embeddings::cosine(vi, vj)
                .expect("table vectors share a dimension and are nonzero");
            pairs += 1;
        }
        if pairs > 0 {
            word_scores.push(pair_sum / pairs as f64);
        }
    }
    if word_scores.is_empty() {
        return None;
    }
    Some(word_scores.iter().sum::<f64>() / word_scores.len() as f64)
}

/// Mean derailment score over a participant's eligible responses.
///
/// Eligibility applies the config's question set and word-count
/// threshold; each eligible response is preprocessed (punctuation
/// stripped, repeats collapsed), filtered, and scored. `None` when no
/// response yields a defined score.
pub fn participant_derailment(
    participant: &Participant,
    config: &DerailmentConfig,
    table: &EmbeddingTable,
) -> Option<DerailmentScore> {
    let eligible =
        corpus::eligible_responses(&participant.responses, &config.questions, config.min_words);
    let mut scores = Vec::new();
    for response in eligible {
        let prepared = corpus::preprocess(response);
        let flat: Vec<&Token> = prepared.tokens().collect();
        let filtered = content_filter(&flat, config.word_filter);
        if let Some(score) = response_derailment(&filtered, table, config.k) {
            scores.push(score);
        }
    }
    if scores.is_empty() {
        return None;
    }
    Some(DerailmentScore {
        participant_id: participant.id.clone(),
        k: config.k,
        filter: config.word_filter,
        value: scores.iter().sum::<f64>() / scores.len() as f64,
        n_responses: scores.len(),
    })
}

/// Scores every participant; participants with no defined score are omitted.
pub fn all_participant_scores(
    corpus: &TranscriptCorpus,
    config: &DerailmentConfig,
    table: &EmbeddingTable,
) -> Vec<DerailmentScore> {
    corpus
        .participants
        .iter()
        .filter_map(|p| participant_derailment(p, config, table))
        .collect()
}

/// Compares the groups' participant scores with Welch's t-test
/// (t is signed control minus patient).
pub fn group_derailment_comparison(
    corpus: &TranscriptCorpus,
    config: &DerailmentConfig,
    table: &EmbeddingTable,
) -> Result<GroupComparison, DerailmentError> {
    let mut control = Vec::new();
    let mut patient = Vec::new();
    for participant in &corpus.participants {
        if let Some(score) = participant_derailment(participant, config, table) {
            match participant.group {
                Group::Control => control.push(score.value),
                Group::Patient => patient.push(score.value),
            }
        }
    }
    for (group, scores) in [(Group::Control, &control), (Group::Patient, &patient)] {
        if scores.len() < 2 {
            return Err(DerailmentError::InsufficientData {
                group,
                n: scores.len(),
            });
        }
    }
    let result = stats::welch_t(&control, &patient)?;
    Ok(GroupComparison {
        control_mean: result.mean_a,
        control_sd: result.sd_a,
        patient_mean: result.mean_b,
        patient_sd: result.sd_b,
        t: result.t,
        p: result.p,
    })
}
