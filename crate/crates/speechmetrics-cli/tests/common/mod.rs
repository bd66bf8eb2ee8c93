//! Synthetic fixture generation shared by the CLI and acceptance tests.
//!
//! Participants come in two geometries: "stable" ones (control group)
//! whose token vectors cluster around a fixed centroid, and "drifting"
//! ones (patient group) whose token vectors follow a random walk, so
//! nearby words stay similar but similarity decays with distance. Every
//! token gets its own vocabulary entry, which makes the vector geometry
//! exact and the fixtures fully deterministic under a seed.

#![allow(dead_code)] // each test binary uses its own subset

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use speechmetrics::corpus::{
    serialize_conllu, serialize_reference_conllu, Group, Participant, ReferenceDocument, Response,
    Token, TranscriptCorpus,
};
use speechmetrics::embeddings::EmbeddingTable;

pub const DIM: usize = 10;

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-12);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn normal_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| normal(rng)).collect()
}

// Rescale to radius sqrt(dim), the typical norm of a unit-normal draw,
// so a drifting walk stays stationary instead of diffusing outward.
fn renormalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = (v.len() as f64).sqrt();
    for x in v.iter_mut() {
        *x *= target / norm;
    }
}

fn token(index: usize, form: &str, upos: &str, head: usize, deprel: &str) -> Token {
    Token {
        index,
        form: form.to_string(),
        lemma: form.to_string(),
        upos: upos.to_string(),
        head,
        deprel: deprel.to_string(),
    }
}

/// An in-memory synthetic corpus plus the vocabulary entries backing it.
pub struct SyntheticCorpus {
    pub corpus: TranscriptCorpus,
    pub entries: Vec<(String, Vec<f64>)>,
}

impl SyntheticCorpus {
    pub fn table(&self) -> EmbeddingTable {
        EmbeddingTable::from_entries(DIM, self.entries.iter().cloned()).unwrap()
    }
}

/// Builds a two-group corpus: `n_stable` control participants with
/// clustered token vectors and `n_drift` patient participants with
/// random-walk token vectors. Each participant answers the four default
/// questions with `words_per_response` single-sentence tokens.
pub fn stable_drift_corpus(
    n_stable: usize,
    n_drift: usize,
    words_per_response: usize,
    seed: u64,
) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centroid: Vec<f64> = normal_vector(&mut rng, DIM);
    let mut entries = Vec::new();
    let mut participants = Vec::new();

    for (group, count) in [(Group::Control, n_stable), (Group::Patient, n_drift)] {
        for p in 0..count {
            let id = match group {
                Group::Control => format!("c{p:02}"),
                Group::Patient => format!("d{p:02}"),
            };
            let mut responses = Vec::new();
            for question in 1..=4 {
                let mut walk = normal_vector(&mut rng, DIM);
                renormalize(&mut walk);
                let mut sentence = Vec::new();
                for t in 0..words_per_response {
                    let word = format!("{id}q{question}w{t:03}");
                    let vector = match group {
                        Group::Control => centroid
                            .iter()
                            .map(|c| c + 0.1 * normal(&mut rng))
                            .collect::<Vec<f64>>(),
                        Group::Patient => {
                            for slot in walk.iter_mut() {
                                *slot += 0.6 * normal(&mut rng);
                            }
                            renormalize(&mut walk);
                            walk.clone()
                        }
                    };
                    entries.push((word.clone(), vector));
                    let upos = ["NOUN", "VERB", "ADJ", "ADV"][t % 4];
                    sentence.push(token(sentence.len() + 1, &word, upos, 0, "root"));
                }
                responses.push(Response {
                    participant_id: id.clone(),
                    question_id: question.to_string(),
                    sentences: vec![sentence],
                });
            }
            participants.push(Participant {
                id,
                group,
                responses,
            });
        }
    }
    SyntheticCorpus {
        corpus: TranscriptCorpus { participants },
        entries,
    }
}

/// File-based fixture: transcripts, reference corpus, and vector file.
pub struct FixtureFiles {
    pub transcripts: std::path::PathBuf,
    pub reference: std::path::PathBuf,
    pub vectors: std::path::PathBuf,
}

const NOUN_HEADS: [&str; 5] = ["thing0", "thing1", "thing2", "thing3", "thing4"];
const VERB_HEADS: [&str; 3] = ["act0", "act1", "act2"];
const OBSERVED_MODS: [&str; 6] = ["moda", "modb", "modc", "modd", "mode", "modf"];
const REF_ADJS: [&str; 4] = ["refadj0", "refadj1", "refadj2", "refadj3"];
const REF_ADVS: [&str; 3] = ["refadv0", "refadv1", "refadv2"];

/// Writes a complete pipeline fixture into `dir`: `n_participants`
/// alternating control/patient participants with four long responses
/// each (stable vs drifting geometry plus punctuation, a doubled word,
/// function words, and modifier sentences), a six-document reference
/// corpus giving every head and modifier a positive IDF, and a vector
/// file covering all scoring vocabulary.
pub fn write_fixture(dir: &Path, n_participants: usize, seed: u64) -> FixtureFiles {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centroid: Vec<f64> = normal_vector(&mut rng, DIM);
    let mut entries: Vec<(String, Vec<f64>)> = Vec::new();

    for pool in [&OBSERVED_MODS[..], &REF_ADJS[..], &REF_ADVS[..]] {
        for word in pool {
            entries.push((word.to_string(), normal_vector(&mut rng, DIM)));
        }
    }
    for i in 0..4 {
        entries.push((format!("det{i}"), normal_vector(&mut rng, DIM)));
    }

    let mut participants = Vec::new();
    for p in 0..n_participants {
        let group = if p % 2 == 0 {
            Group::Control
        } else {
            Group::Patient
        };
        let id = format!("p{p:02}");
        let mut responses = Vec::new();
        for question in 1..=4 {
            let mut sentence = Vec::new();
            let mut walk = normal_vector(&mut rng, DIM);
            renormalize(&mut walk);
            for t in 0..55 {
                let word = format!("{id}q{question}w{t:03}");
                let vector = match group {
                    Group::Control => centroid
                        .iter()
                        .map(|c| c + 0.1 * normal(&mut rng))
                        .collect::<Vec<f64>>(),
                    Group::Patient => {
                        for slot in walk.iter_mut() {
                            *slot += 0.6 * normal(&mut rng);
                        }
                        renormalize(&mut walk);
                        walk.clone()
                    }
                };
                entries.push((word.clone(), vector));
                let upos = ["NOUN", "VERB", "ADJ", "ADV"][t % 4];
                sentence.push(token(sentence.len() + 1, &word, upos, 0, "root"));
                if t % 13 == 5 {
                    // emphasis doubling, collapsed during preprocessing
                    sentence.push(token(sentence.len() + 1, &word, upos, 0, "root"));
                }
                if t % 11 == 3 {
                    let det = format!("det{}", t % 4);
                    sentence.push(token(sentence.len() + 1, &det, "DET", 0, "root"));
                }
                if t % 17 == 7 {
                    sentence.push(token(sentence.len() + 1, ",", "PUNCT", 0, "punct"));
                }
            }
            // modifier sentences: noun + adjective, verb + adverb
            let noun = NOUN_HEADS[(p + question) % NOUN_HEADS.len()];
            let verb = VERB_HEADS[(p + question) % VERB_HEADS.len()];
            let adj = OBSERVED_MODS[(p + 2 * question) % OBSERVED_MODS.len()];
            let adv = OBSERVED_MODS[(p + 2 * question + 3) % OBSERVED_MODS.len()];
            let noun_sentence = vec![
                token(1, adj, "ADJ", 2, "amod"),
                token(2, noun, "NOUN", 0, "root"),
            ];
            let verb_sentence = vec![
                token(1, verb, "VERB", 0, "root"),
                token(2, adv, "ADV", 1, "advmod"),
            ];
            responses.push(Response {
                participant_id: id.clone(),
                question_id: question.to_string(),
                sentences: vec![sentence, noun_sentence, verb_sentence],
            });
        }
        participants.push(Participant {
            id,
            group,
            responses,
        });
    }
    let corpus = TranscriptCorpus { participants };

    // Reference corpus: heads and reference modifiers live in two of the
    // six documents, so every lemma of interest has df 2 and idf ln 3.
    let mut reference = Vec::new();
    for d in 0..2 {
        let mut sentences = Vec::new();
        for (i, noun) in NOUN_HEADS.iter().enumerate() {
            let adj = REF_ADJS[(i + d) % REF_ADJS.len()];
            sentences.push(vec![
                token(1, adj, "ADJ", 2, "amod"),
                token(2, noun, "NOUN", 0, "root"),
            ]);
        }
        for (i, verb) in VERB_HEADS.iter().enumerate() {
            let adv = REF_ADVS[(i + d) % REF_ADVS.len()];
            sentences.push(vec![
                token(1, verb, "VERB", 0, "root"),
                token(2, adv, "ADV", 1, "advmod"),
            ]);
        }
        // observed modifiers also occur in the reference so they carry IDFs
        for (i, m) in OBSERVED_MODS.iter().enumerate() {
            let noun = NOUN_HEADS[(i + d) % NOUN_HEADS.len()];
            sentences.push(vec![
                token(1, m, "ADJ", 2, "amod"),
                token(2, noun, "NOUN", 0, "root"),
            ]);
        }
        reference.push(ReferenceDocument {
            doc_id: format!("ref{d}"),
            sentences,
        });
    }
    for d in 2..6 {
        reference.push(ReferenceDocument {
            doc_id: format!("ref{d}"),
            sentences: vec![vec![token(1, &format!("fill{d}"), "NOUN", 0, "root")]],
        });
    }

    let mut vectors_text = format!("{} {}\n", entries.len(), DIM);
    for (word, vector) in &entries {
        vectors_text.push_str(word);
        for v in vector {
            vectors_text.push_str(&format!(" {v:.6}"));
        }
        vectors_text.push('\n');
    }

    let files = FixtureFiles {
        transcripts: dir.join("transcripts.conllu"),
        reference: dir.join("reference.conllu"),
        vectors: dir.join("vectors.vec"),
    };
    std::fs::write(&files.transcripts, serialize_conllu(&corpus)).unwrap();
    std::fs::write(&files.reference, serialize_reference_conllu(&reference)).unwrap();
    std::fs::write(&files.vectors, vectors_text).unwrap();
    files
}
