//! Modifier-typicality scoring.
//!
//! Noun-adjective and verb-adverb pairs are read off the dependency
//! arcs of each sentence. A reference corpus provides, per head lemma,
//! the modifiers ordinarily used with it; an observed modifier is scored
//! by its cosine to the IDF-weighted centroid of those reference
//! modifiers. Low scores flag atypical modifier choice.
//!
//! Heads are matched at the lemma level. Modifier vectors are looked up
//! by surface form, falling back to the lemma when the form is out of
//! vocabulary.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::corpus::{Participant, ReferenceDocument, Response, Sentence, TranscriptCorpus};
use crate::embeddings::{self, EmbeddingTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeadClass {
    Noun,
    Verb,
}

impl HeadClass {
    pub fn as_str(self) -> &'static str {
        match self {
            HeadClass::Noun => "noun",
            HeadClass::Verb => "verb",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModifierClass {
    Adjective,
    Adverb,
}

impl ModifierClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ModifierClass::Adjective => "adjective",
            ModifierClass::Adverb => "adverb",
        }
    }

    pub fn head_class(self) -> HeadClass {
        match self {
            ModifierClass::Adjective => HeadClass::Noun,
            ModifierClass::Adverb => HeadClass::Verb,
        }
    }
}

/// One modifier attachment: an adjective on a noun or an adverb on a verb.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifierPair {
    pub head_lemma: String,
    pub head_class: HeadClass,
    pub modifier_form: String,
    pub modifier_lemma: String,
    pub modifier_class: ModifierClass,
}

/// A reference-corpus modifier occurrence (kept with multiplicity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefModifier {
    pub form: String,
    pub lemma: String,
}

/// Modifier statistics collected from a reference corpus: document
/// frequencies over all lemmas, and per head lemma the multiset of
/// modifiers seen with it. Immutable once built.
#[derive(Debug, Clone)]
pub struct ReferenceStats {
    n_docs: usize,
    df: HashMap<String, usize>,
    noun_modifiers: HashMap<String, Vec<RefModifier>>,
    verb_modifiers: HashMap<String, Vec<RefModifier>>,
}

#[derive(Debug, Error)]
pub enum ModifierError {
    #[error("reference corpus has no documents")]
    EmptyReference,
    #[error("duplicate doc_id {0:?} in merged reference corpus")]
    DuplicateDocId(String),
}

// Dependency relations are matched on the base relation, so subtype
// variants such as "amod:flat" still count.
fn base_relation(deprel: &str) -> &str {
    deprel.split(':').next().unwrap_or(deprel)
}

fn pair_from_arc(sentence: &Sentence, dependent: &crate::corpus::Token) -> Option<ModifierPair> {
    let modifier_class = match (base_relation(&dependent.deprel), dependent.upos.as_str()) {
        ("amod", "ADJ") => ModifierClass::Adjective,
        ("advmod", "ADV") => ModifierClass::Adverb,
        _ => return None,
    };
    if dependent.head == 0 || dependent.head > sentence.len() {
        return None;
    }
    let head = &sentence[dependent.head - 1];
    let head_class = modifier_class.head_class();
    let expected_upos = match head_class {
        HeadClass::Noun => "NOUN",
        HeadClass::Verb => "VERB",
    };
    if head.upos != expected_upos {
        return None;
    }
    Some(ModifierPair {
        head_lemma: head.lemma.clone(),
        head_class,
        modifier_form: dependent.form.clone(),
        modifier_lemma: dependent.lemma.clone(),
        modifier_class,
    })
}

/// Extracts every noun-adjective and verb-adverb pair from the given
/// sentences, in reading order. Runs on the dependency annotation as
/// parsed, before any preprocessing disturbs head indices.
pub fn extract_modifier_pairs(sentences: &[Sentence]) -> Vec<ModifierPair> {
    sentences
        .iter()
        .flat_map(|sentence| {
            sentence
                .iter()
                .filter_map(move |token| pair_from_arc(sentence, token))
        })
        .collect()
}

/// Builds reference statistics from the documents of one or more
/// reference corpora. Document frequencies count, per lemma, the number
/// of documents whose lemma set contains it; modifiers accumulate with
/// multiplicity. Doc ids must be unique across the merged input.
pub fn build_reference_stats(docs: &[ReferenceDocument]) -> Result<ReferenceStats, ModifierError> {
    if docs.is_empty() {
        return Err(ModifierError::EmptyReference);
    }
    let mut seen_ids = HashSet::new();
    let mut df: HashMap<String, usize> = HashMap::new();
    let mut noun_modifiers: HashMap<String, Vec<RefModifier>> = HashMap::new();
    let mut verb_modifiers: HashMap<String, Vec<RefModifier>> = HashMap::new();

    for doc in docs {
        if !seen_ids.insert(doc.doc_id.as_str()) {
            return Err(ModifierError::DuplicateDocId(doc.doc_id.clone()));
        }
        let mut lemmas = HashSet::new();
        for sentence in &doc.sentences {
            for token in sentence {
                lemmas.insert(token.lemma.as_str());
            }
        }
        for lemma in lemmas {
            *df.entry(lemma.to_string()).or_insert(0) += 1;
        }
        for pair in extract_modifier_pairs(&doc.sentences) {
            let map = match pair.head_class {
                HeadClass::Noun => &mut noun_modifiers,
                HeadClass::Verb => &mut verb_modifiers,
            };
            map.entry(pair.head_lemma).or_default().push(RefModifier {
                form: pair.modifier_form,
                lemma: pair.modifier_lemma,
            });
        }
    }
    Ok(ReferenceStats {
        n_docs: docs.len(),
        df,
        noun_modifiers,
        verb_modifiers,
    })
}

impl ReferenceStats {
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn document_frequency(&self, lemma: &str) -> Option<usize> {
        self.df.get(lemma).copied()
    }

    /// IDF weight ln(N / df), or `None` for lemmas the reference corpus
    /// never saw. df >= 1 whenever present, so the log is well defined.
    pub fn idf(&self, lemma: &str) -> Option<f64> {
        self.df
            .get(lemma)
            .map(|df| (self.n_docs as f64 / *df as f64).ln())
    }

    /// Total modifier occurrences recorded, across both head classes.
    pub fn modifier_count(&self) -> usize {
        self.noun_modifiers.values().map(Vec::len).sum::<usize>()
            + self.verb_modifiers.values().map(Vec::len).sum::<usize>()
    }

    /// Reference modifiers recorded for a head lemma, with multiplicity.
    pub fn modifiers_of(&self, head_lemma: &str, head_class: HeadClass) -> Option<&[RefModifier]> {
        let map = match head_class {
            HeadClass::Noun => &self.noun_modifiers,
            HeadClass::Verb => &self.verb_modifiers,
        };
        map.get(head_lemma).map(Vec::as_slice)
    }
}

fn modifier_vector<'a>(table: &'a EmbeddingTable, form: &str, lemma: &str) -> Option<&'a [f64]> {
    table
        .lookup(form)
        .or_else(|| table.lookup(lemma))
        .filter(|v| !embeddings::is_zero_norm(v))
}

/// IDF-weighted centroid of the reference modifiers of a head, or `None`
/// when no reference modifier carries both a positive IDF and a vector.
pub fn reference_centroid(
    head_lemma: &str,
    head_class: HeadClass,
    stats: &ReferenceStats,
    table: &EmbeddingTable,
) -> Option<Vec<f64>> {
    let mods = stats.modifiers_of(head_lemma, head_class)?;
    let mut items: Vec<(&[f64], f64)> = Vec::new();
    for m in mods {
        let Some(weight) = stats.idf(&m.lemma) else {
            continue;
        };
        if weight <= 0.0 {
            continue;
        }
        let Some(vec) = modifier_vector(table, &m.form, &m.lemma) else {
            continue;
        };
        items.push((vec, weight));
    }
    embeddings::weighted_centroid(&items).ok()
}

/// Scores one observed pair against the reference centroid of its head.
///
/// `None` when the head has no IDF or no reference modifiers, when every
/// reference modifier drops out (zero weight or no vector), or when the
/// observed modifier has no vector.
pub fn modifier_score(
    pair: &ModifierPair,
    stats: &ReferenceStats,
    table: &EmbeddingTable,
) -> Option<f64> {
    stats.idf(&pair.head_lemma)?;
    let centroid = reference_centroid(&pair.head_lemma, pair.head_class, stats, table)?;
    let observed = modifier_vector(table, &pair.modifier_form, &pair.modifier_lemma)?;
    embeddings::cosine(observed, &centroid).ok()
}

/// Heads seen with at least one extracted modifier anywhere in the
/// transcript corpus, by class.
#[derive(Debug, Clone, Default)]
pub struct ObservedHeads {
    nouns: HashSet<String>,
    verbs: HashSet<String>,
}

impl ObservedHeads {
    pub fn contains(&self, head_lemma: &str, head_class: HeadClass) -> bool {
        match head_class {
            HeadClass::Noun => self.nouns.contains(head_lemma),
            HeadClass::Verb => self.verbs.contains(head_lemma),
        }
    }
}

pub fn observed_modifier_heads(corpus: &TranscriptCorpus) -> ObservedHeads {
    let mut observed = ObservedHeads::default();
    for response in corpus.responses() {
        for pair in extract_modifier_pairs(&response.sentences) {
            match pair.head_class {
                HeadClass::Noun => observed.nouns.insert(pair.head_lemma),
                HeadClass::Verb => observed.verbs.insert(pair.head_lemma),
            };
        }
    }
    observed
}

/// A qualified head has an IDF score, appears with at least one modifier
/// in the transcript corpus, and has reference modifiers to build a
/// centroid from.
pub fn is_qualified(
    head_lemma: &str,
    head_class: HeadClass,
    stats: &ReferenceStats,
    observed: &ObservedHeads,
) -> bool {
    stats.idf(head_lemma).is_some()
        && observed.contains(head_lemma, head_class)
        && stats.modifiers_of(head_lemma, head_class).is_some()
}

/// Response-level scores, one per modifier class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseModifierScores {
    pub adjective: Option<f64>,
    pub adverb: Option<f64>,
}

/// Scores one response: per class, the average of the defined pair
/// scores weighted by the IDF of each pair's head lemma. `None` for a
/// class with no defined scores (or only zero-IDF heads).
pub fn response_modifier_scores(
    response: &Response,
    stats: &ReferenceStats,
    table: &EmbeddingTable,
) -> ResponseModifierScores {
    let mut sums = HashMap::new();
    for pair in extract_modifier_pairs(&response.sentences) {
        let Some(score) = modifier_score(&pair, stats, table) else {
            continue;
        };
        let weight = stats
            .idf(&pair.head_lemma)
            .expect("scored pair implies the head has an IDF");
        let slot = sums.entry(pair.modifier_class).or_insert((0.0, 0.0));
        slot.0 += weight * score;
        slot.1 += weight;
    }
    let take = |class: ModifierClass| {
        sums.get(&class)
            .filter(|(_, w)| *w > 0.0)
            .map(|(ws, w)| ws / w)
    };
    ResponseModifierScores {
        adjective: take(ModifierClass::Adjective),
        adverb: take(ModifierClass::Adverb),
    }
}

/// Head and modifier counts per participant, following the total /
/// qualified breakdown of the study's count table. Noun and verb totals
/// count POS-tagged tokens; a token is qualified when its lemma is. The
/// modifier totals count extracted pairs; a pair is qualified when its
/// head is.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QualifiedCounts {
    pub nouns_total: usize,
    pub nouns_qualified: usize,
    pub verbs_total: usize,
    pub verbs_qualified: usize,
    pub adjectives_total: usize,
    pub adjectives_qualified: usize,
    pub adverbs_total: usize,
    pub adverbs_qualified: usize,
}

impl QualifiedCounts {
    pub fn add(&mut self, other: &QualifiedCounts) {
        self.nouns_total += other.nouns_total;
        self.nouns_qualified += other.nouns_qualified;
        self.verbs_total += other.verbs_total;
        self.verbs_qualified += other.verbs_qualified;
        self.adjectives_total += other.adjectives_total;
        self.adjectives_qualified += other.adjectives_qualified;
        self.adverbs_total += other.adverbs_total;
        self.adverbs_qualified += other.adverbs_qualified;
    }
}

/// One participant's modifier-coherence summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifierScores {
    pub participant_id: String,
    pub adjective_score: Option<f64>,
    pub adverb_score: Option<f64>,
    pub counts: QualifiedCounts,
}

/// Scores a participant: per class, the unweighted mean of the defined
/// response-level scores. All responses participate; there is no length
/// gate in this experiment.
pub fn participant_modifier_scores(
    participant: &Participant,
    stats: &ReferenceStats,
    table: &EmbeddingTable,
    observed: &ObservedHeads,
) -> ModifierScores {
    let mut adjective = Vec::new();
    let mut adverb = Vec::new();
    let mut counts = QualifiedCounts::default();

    for response in &participant.responses {
        let scores = response_modifier_scores(response, stats, table);
        if let Some(s) = scores.adjective {
            adjective.push(s);
        }
        if let Some(s) = scores.adverb {
            adverb.push(s);
        }

        for token in response.tokens() {
            let class = match token.upos.as_str() {
                "NOUN" => HeadClass::Noun,
                "VERB" => HeadClass::Verb,
                _ => continue,
            };
            let qualified = is_qualified(&token.lemma, class, stats, observed);
            match class {
                HeadClass::Noun => {
                    counts.nouns_total += 1;
                    counts.nouns_qualified += qualified as usize;
                }
                HeadClass::Verb => {
                    counts.verbs_total += 1;
                    counts.verbs_qualified += qualified as usize;
                }
            }
        }
        for pair in extract_modifier_pairs(&response.sentences) {
            let qualified = is_qualified(&pair.head_lemma, pair.head_class, stats, observed);
            match pair.modifier_class {
                ModifierClass::Adjective => {
                    counts.adjectives_total += 1;
                    counts.adjectives_qualified += qualified as usize;
                }
                ModifierClass::Adverb => {
                    counts.adverbs_total += 1;
                    counts.adverbs_qualified += qualified as usize;
                }
            }
        }
    }

    let mean = |v: &[f64]| {
        if v.is_empty() {
            None
        } else {
            Some(v.iter().sum::<f64>() / v.len() as f64)
        }
    };
    ModifierScores {
        participant_id: participant.id.clone(),
        adjective_score: mean(&adjective),
        adverb_score: mean(&adverb),
        counts,
    }
}
