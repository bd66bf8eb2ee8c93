//! Pretrained word-vector tables and the vector arithmetic built on them.
//!
//! Vectors are loaded from the plain-text format used by fastText and
//! friends: an optional `count dim` header line followed by one
//! `word v1 v2 ... v_dim` line per word. Lookups are exact surface-form
//! matches with no subword fallback; callers treat out-of-vocabulary
//! words as missing data rather than imputing vectors for them.

use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

use crate::corpus::TranscriptCorpus;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("empty vector stream: no dimensionality derivable")]
    EmptyStream,
    #[error("line {line}: header declares dimensionality 0")]
    ZeroDim { line: usize },
    #[error("line {line}: expected {expected} vector components, found {found}")]
    Arity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: component {value:?} is not a finite number")]
    BadComponent { line: usize, value: String },
    #[error("vector length mismatch: {a} vs {b}")]
    DimMismatch { a: usize, b: usize },
    #[error("zero-norm vector has no direction; cosine undefined")]
    ZeroNorm,
    #[error("weighted centroid needs at least one item with positive weight")]
    NoWeight,
    #[error("negative weight {0} in weighted centroid")]
    NegativeWeight(f64),
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

/// Immutable word → vector map with a fixed dimensionality.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    /// Builds a table from in-memory entries. Mainly useful for tests and
    /// synthetic pipelines; file loading goes through [`load_vectors`].
    pub fn from_entries<I, S>(dim: usize, entries: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut vectors = HashMap::new();
        for (word, vec) in entries {
            if vec.len() != dim {
                return Err(EmbeddingError::DimMismatch {
                    a: dim,
                    b: vec.len(),
                });
            }
            vectors.entry(word.into()).or_insert(vec);
        }
        Ok(Self { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Exact surface-form lookup. Absence is a value, not an error.
    pub fn lookup(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vectors.contains_key(word)
    }
}

/// Loads a plain-text vector file.
///
/// The first line is treated as a `count dim` header when it consists of
/// exactly two unsigned integers; otherwise it is parsed as the first
/// vector line and the dimensionality is inferred from it. A declared
/// header count is not trusted — every following line is parsed. When the
/// same word appears twice, the first occurrence wins. Blank lines are
/// skipped. Components must be finite.
pub fn load_vectors<R: BufRead>(reader: R) -> Result<EmbeddingTable, EmbeddingError> {
    let mut dim: Option<usize> = None;
    let mut vectors: HashMap<String, Vec<f64>> = HashMap::new();

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let mut fields = line.split_whitespace();
        let Some(word) = fields.next() else {
            continue; // blank line
        };
        let rest: Vec<&str> = fields.collect();

        if dim.is_none() && rest.len() == 1 {
            if let (Ok(_count), Ok(d)) = (word.parse::<usize>(), rest[0].parse::<usize>()) {
                if d == 0 {
                    return Err(EmbeddingError::ZeroDim { line: line_no });
                }
                dim = Some(d);
                continue;
            }
        }

        let expected = match dim {
            Some(d) => d,
            None => {
                if rest.is_empty() {
                    return Err(EmbeddingError::Arity {
                        line: line_no,
                        expected: 1,
                        found: 0,
                    });
                }
                dim = Some(rest.len());
                rest.len()
            }
        };
        if rest.len() != expected {
            return Err(EmbeddingError::Arity {
                line: line_no,
                expected,
                found: rest.len(),
            });
        }

        let mut vec = Vec::with_capacity(expected);
        for field in &rest {
            let value: f64 = field.parse().map_err(|_| EmbeddingError::BadComponent {
                line: line_no,
                value: (*field).to_string(),
            })?;
            if !value.is_finite() {
                return Err(EmbeddingError::BadComponent {
                    line: line_no,
                    value: (*field).to_string(),
                });
            }
            vec.push(value);
        }
        vectors.entry(word.to_string()).or_insert(vec);
    }

    match dim {
        Some(dim) => Ok(EmbeddingTable { dim, vectors }),
        None => Err(EmbeddingError::EmptyStream),
    }
}

/// Cosine of the angle between two vectors, in [-1, 1].
///
/// Zero-norm inputs are a domain error; callers are expected to skip
/// zero vectors rather than score them.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, EmbeddingError> {
    if a.len() != b.len() {
        return Err(EmbeddingError::DimMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(EmbeddingError::ZeroNorm);
    }
    Ok(dot / (na.sqrt() * nb.sqrt()))
}

pub(crate) fn is_zero_norm(v: &[f64]) -> bool {
    v.iter().all(|x| *x == 0.0)
}

/// Fraction of the corpus vocabulary covered by the table.
///
/// Coverage is over distinct surface forms (types, not tokens). An empty
/// corpus has coverage 1.0 by convention: there is nothing left uncovered.
pub fn coverage(table: &EmbeddingTable, corpus: &TranscriptCorpus) -> f64 {
    let mut forms = std::collections::HashSet::new();
    for participant in &corpus.participants {
        for response in &participant.responses {
            for token in response.tokens() {
                forms.insert(token.form.as_str());
            }
        }
    }
    if forms.is_empty() {
        return 1.0;
    }
    let covered = forms.iter().filter(|f| table.contains(f)).count();
    covered as f64 / forms.len() as f64
}

/// Element-wise weighted average: sum(w_i * v_i) / sum(w_i).
///
/// Errors when the list is empty, every weight is zero, or a weight is
/// negative. Invariant under uniform positive scaling of the weights.
pub fn weighted_centroid(items: &[(&[f64], f64)]) -> Result<Vec<f64>, EmbeddingError> {
    let Some((first, _)) = items.first() else {
        return Err(EmbeddingError::NoWeight);
    };
    let dim = first.len();
    let mut acc = vec![0.0; dim];
    let mut total = 0.0;
    for (vec, weight) in items {
        if vec.len() != dim {
            return Err(EmbeddingError::DimMismatch {
                a: dim,
                b: vec.len(),
            });
        }
        if *weight < 0.0 {
            return Err(EmbeddingError::NegativeWeight(*weight));
        }
        for (slot, x) in acc.iter_mut().zip(*vec) {
            *slot += weight * x;
        }
        total += weight;
    }
    if total == 0.0 {
        return Err(EmbeddingError::NoWeight);
    }
    for slot in &mut acc {
        *slot /= total;
    }
    Ok(acc)
}
