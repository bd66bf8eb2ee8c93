//! Coherence metrics for annotated speech transcripts.
//!
//! The library ingests CoNLL-U-annotated interview transcripts and
//! computes two families of scores per participant: windowed derailment
//! scores (mean cosine similarity of each word to the `k` words that
//! follow it) and modifier-coherence scores (how close each observed
//! adjective or adverb is to the modifiers a reference corpus typically
//! attaches to the same head lemma). The scores feed group comparisons
//! with Welch's t-test and a 12-feature cross-validated classifier.
//!
//! Modules follow the pipeline: [`corpus`] parses and preprocesses,
//! [`embeddings`] loads word vectors, [`derailment`] and
//! [`modifier_coherence`] score, [`stats`] compares groups, and
//! [`classify`] assembles feature vectors and evaluates classifiers.

pub mod classify;
pub mod corpus;
pub mod derailment;
pub mod embeddings;
pub mod modifier_coherence;
pub mod stats;

pub use corpus::{Group, Participant, Response, Token, TranscriptCorpus};
pub use embeddings::EmbeddingTable;
