//! The transcript domain model and its CoNLL-U carrier format.
//!
//! Transcripts arrive pre-annotated (tagger and dependency parser run
//! upstream) as CoNLL-U: 10 tab-separated columns per token line, blank
//! lines between sentences, and `# key = value` comments carrying the
//! response metadata. Three keys are recognized in transcripts —
//! `participant_id`, `group`, `question_id` — and one in reference
//! corpora, `doc_id`. A metadata comment opens a new response (or
//! document); its values stay in force for the following sentences until
//! the next comment block.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::BufRead;

use thiserror::Error;

/// Universal POS tag used for punctuation tokens.
pub const PUNCT_TAG: &str = "PUNCT";

/// One annotated word.
///
/// `index` is the 1-based position within its sentence; `head` is the
/// index of the governing token, with 0 meaning root (or detached, after
/// preprocessing removes the original head).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub head: usize,
    pub deprel: String,
}

pub type Sentence = Vec<Token>;

/// One participant's answer to one question, as a list of sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub participant_id: String,
    pub question_id: String,
    pub sentences: Vec<Sentence>,
}

impl Response {
    /// Total token count across sentences.
    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    /// Tokens in reading order, crossing sentence boundaries.
    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flatten()
    }
}

/// Diagnostic group of a participant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Control,
    Patient,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Control => "control",
            Group::Patient => "patient",
        }
    }

    pub fn parse(value: &str) -> Option<Self> {
        match value.to_ascii_lowercase().as_str() {
            "control" => Some(Group::Control),
            "patient" => Some(Group::Patient),
            _ => None,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Participant {
    pub id: String,
    pub group: Group,
    pub responses: Vec<Response>,
}

/// All participants of one study, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TranscriptCorpus {
    pub participants: Vec<Participant>,
}

impl TranscriptCorpus {
    pub fn responses(&self) -> impl Iterator<Item = &Response> {
        self.participants.iter().flat_map(|p| p.responses.iter())
    }
}

/// One document of a reference corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceDocument {
    pub doc_id: String,
    pub sentences: Vec<Sentence>,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: invalid token id {id:?}")]
    BadId { line: usize, id: String },
    #[error("line {line}: token id {id} is out of sequence (expected {expected})")]
    NonSequentialId {
        line: usize,
        id: usize,
        expected: usize,
    },
    #[error("line {line}: empty {field} column")]
    EmptyField { line: usize, field: &'static str },
    #[error("line {line}: invalid head {head:?}")]
    BadHead { line: usize, head: String },
    #[error("line {line}: token is its own head")]
    SelfHead { line: usize },
    #[error("line {line}: head {head} exceeds sentence length {len}")]
    HeadOutOfRange {
        line: usize,
        head: usize,
        len: usize,
    },
    #[error("line {line}: token line before a participant_id comment")]
    MissingParticipantId { line: usize },
    #[error("line {line}: token line before a group comment")]
    MissingGroup { line: usize },
    #[error("line {line}: unknown group {value:?} (expected control or patient)")]
    BadGroup { line: usize, value: String },
    #[error("line {line}: participant {id:?} appears as both {first} and {second}")]
    GroupConflict {
        line: usize,
        id: String,
        first: Group,
        second: Group,
    },
    #[error("line {line}: token line before a doc_id comment")]
    MissingDocId { line: usize },
    #[error("duplicate doc_id {0:?}")]
    DuplicateDocId(String),
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

// A raw token line: integer-id token, multiword range, or empty node.
enum Line {
    Token { token: Token, line: usize },
    Skip,
}

fn parse_token_line(raw: &str, line: usize, next_index: usize) -> Result<Line, ParseError> {
    let cols: Vec<&str> = raw.split('\t').collect();
    if cols.len() != 10 {
        return Err(ParseError::ColumnCount {
            line,
            found: cols.len(),
        });
    }
    let id = cols[0];
    // Multiword ranges ("3-4") and empty nodes ("8.1") carry no
    // annotation we consume; skip them without advancing the index.
    for sep in ['-', '.'] {
        if let Some((lo, hi)) = id.split_once(sep) {
            return if lo.parse::<usize>().is_ok() && hi.parse::<usize>().is_ok() {
                Ok(Line::Skip)
            } else {
                Err(ParseError::BadId {
                    line,
                    id: id.to_string(),
                })
            };
        }
    }
    let id: usize = id.parse().map_err(|_| ParseError::BadId {
        line,
        id: cols[0].to_string(),
    })?;
    if id != next_index {
        return Err(ParseError::NonSequentialId {
            line,
            id,
            expected: next_index,
        });
    }
    if cols[1].is_empty() {
        return Err(ParseError::EmptyField {
            line,
            field: "FORM",
        });
    }
    if cols[2].is_empty() {
        return Err(ParseError::EmptyField {
            line,
            field: "LEMMA",
        });
    }
    let head = match cols[6] {
        "_" => 0,
        other => other.parse().map_err(|_| ParseError::BadHead {
            line,
            head: other.to_string(),
        })?,
    };
    if head == id {
        return Err(ParseError::SelfHead { line });
    }
    Ok(Line::Token {
        token: Token {
            index: id,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
        },
        line,
    })
}

fn check_heads(sentence: &[Token], lines: &[usize]) -> Result<(), ParseError> {
    let len = sentence.len();
    for (token, line) in sentence.iter().zip(lines) {
        if token.head > len {
            return Err(ParseError::HeadOutOfRange {
                line: *line,
                head: token.head,
                len,
            });
        }
    }
    Ok(())
}

fn metadata_kv(comment: &str) -> Option<(&str, &str)> {
    let body = comment.strip_prefix('#')?;
    let (key, value) = body.split_once('=')?;
    Some((key.trim(), value.trim()))
}

/// Parses a transcript corpus from CoNLL-U.
///
/// Tokens are taken from the FORM, LEMMA, UPOS, HEAD, and DEPREL columns;
/// the rest are ignored. A `participant_id` and `group` comment must
/// precede the first token line; `question_id` defaults to the empty
/// string when never set. Any of the three metadata comments closes the
/// response in progress, so re-stating identical metadata separates two
/// responses to the same question.
pub fn parse_conllu<R: BufRead>(reader: R) -> Result<TranscriptCorpus, ParseError> {
    let mut corpus = TranscriptCorpus::default();
    let mut index: HashMap<String, usize> = HashMap::new();

    let mut participant_id: Option<String> = None;
    let mut group: Option<Group> = None;
    let mut question_id = String::new();

    let mut sentence: Sentence = Vec::new();
    let mut token_lines: Vec<usize> = Vec::new();
    let mut open: Option<Response> = None;

    let mut push_response =
        |corpus: &mut TranscriptCorpus, response: Response, group: Group, line: usize| {
            match index.get(&response.participant_id) {
                Some(&at) => {
                    let owner = &mut corpus.participants[at];
                    if owner.group != group {
                        return Err(ParseError::GroupConflict {
                            line,
                            id: response.participant_id,
                            first: owner.group,
                            second: group,
                        });
                    }
                    owner.responses.push(response);
                }
                None => {
                    index.insert(response.participant_id.clone(), corpus.participants.len());
                    corpus.participants.push(Participant {
                        id: response.participant_id.clone(),
                        group,
                        responses: vec![response],
                    });
                }
            }
            Ok(())
        };

    // Invariant: a non-empty pending sentence implies an open response.
    fn finish_sentence(
        sentence: &mut Sentence,
        token_lines: &mut Vec<usize>,
        open: &mut Option<Response>,
    ) -> Result<(), ParseError> {
        if sentence.is_empty() {
            return Ok(());
        }
        check_heads(sentence, token_lines)?;
        let done = std::mem::take(sentence);
        token_lines.clear();
        open.as_mut()
            .expect("a token line established the open response")
            .sentences
            .push(done);
        Ok(())
    }

    let mut line_no = 0;
    let mut buf = String::new();
    let mut reader = reader;
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf)?;
        let eof = n == 0;
        line_no += 1;
        let raw = buf.trim_end_matches(['\n', '\r']);

        if eof || raw.is_empty() {
            finish_sentence(&mut sentence, &mut token_lines, &mut open)?;
            if eof {
                break;
            }
            continue;
        }

        if raw.starts_with('#') {
            let Some((key, value)) = metadata_kv(raw) else {
                continue;
            };
            if !matches!(key, "participant_id" | "group" | "question_id") {
                continue;
            }
            // A metadata comment marks a response boundary. Responses
            // that never received a sentence are dropped.
            finish_sentence(&mut sentence, &mut token_lines, &mut open)?;
            if let Some(response) = open.take() {
                if !response.sentences.is_empty() {
                    let g = group.expect("open response implies group was set");
                    push_response(&mut corpus, response, g, line_no)?;
                }
            }
            match key {
                "participant_id" => participant_id = Some(value.to_string()),
                "question_id" => question_id = value.to_string(),
                "group" => {
                    group = Some(Group::parse(value).ok_or_else(|| ParseError::BadGroup {
                        line: line_no,
                        value: value.to_string(),
                    })?);
                }
                _ => unreachable!(),
            }
            continue;
        }

        // Token line.
        if open.is_none() {
            let pid = participant_id
                .clone()
                .ok_or(ParseError::MissingParticipantId { line: line_no })?;
            if group.is_none() {
                return Err(ParseError::MissingGroup { line: line_no });
            }
            open = Some(Response {
                participant_id: pid,
                question_id: question_id.clone(),
                sentences: Vec::new(),
            });
        }
        match parse_token_line(raw, line_no, sentence.len() + 1)? {
            Line::Token { token, line } => {
                sentence.push(token);
                token_lines.push(line);
            }
            Line::Skip => {}
        }
    }

    if let Some(response) = open {
        if !response.sentences.is_empty() {
            let g = group.expect("open response implies group was set");
            push_response(&mut corpus, response, g, line_no)?;
        }
    }
    Ok(corpus)
}

/// Parses a reference corpus: one document per `# doc_id = ...` block.
///
/// Document ids must be unique. Transcript metadata keys occurring in a
/// reference file are ignored like any other comment.
pub fn parse_reference_conllu<R: BufRead>(reader: R) -> Result<Vec<ReferenceDocument>, ParseError> {
    let mut docs: Vec<ReferenceDocument> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();

    let mut sentence: Sentence = Vec::new();
    let mut token_lines: Vec<usize> = Vec::new();

    fn finish_sentence(
        sentence: &mut Sentence,
        token_lines: &mut Vec<usize>,
        docs: &mut [ReferenceDocument],
    ) -> Result<(), ParseError> {
        if sentence.is_empty() {
            return Ok(());
        }
        check_heads(sentence, token_lines)?;
        let done = std::mem::take(sentence);
        token_lines.clear();
        docs.last_mut()
            .expect("a token line established the open document")
            .sentences
            .push(done);
        Ok(())
    }

    let mut line_no = 0;
    let mut buf = String::new();
    let mut reader = reader;
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf)?;
        let eof = n == 0;
        line_no += 1;
        let raw = buf.trim_end_matches(['\n', '\r']);

        if eof || raw.is_empty() {
            finish_sentence(&mut sentence, &mut token_lines, &mut docs)?;
            if eof {
                break;
            }
            continue;
        }

        if raw.starts_with('#') {
            if let Some(("doc_id", value)) = metadata_kv(raw) {
                finish_sentence(&mut sentence, &mut token_lines, &mut docs)?;
                if !seen.insert(value.to_string()) {
                    return Err(ParseError::DuplicateDocId(value.to_string()));
                }
                docs.push(ReferenceDocument {
                    doc_id: value.to_string(),
                    sentences: Vec::new(),
                });
            }
            continue;
        }

        if docs.is_empty() {
            return Err(ParseError::MissingDocId { line: line_no });
        }
        match parse_token_line(raw, line_no, sentence.len() + 1)? {
            Line::Token { token, line } => {
                sentence.push(token);
                token_lines.push(line);
            }
            Line::Skip => {}
        }
    }
    Ok(docs)
}

fn write_sentences(out: &mut String, sentences: &[Sentence]) {
    use fmt::Write;
    for sentence in sentences {
        for token in sentence {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_",
                token.index, token.form, token.lemma, token.upos, token.head, token.deprel
            )
            .expect("string write cannot fail");
        }
        out.push('\n');
    }
}

/// Serializes a corpus back to CoNLL-U.
///
/// Each response gets a full metadata block, so the output re-parses to a
/// field-by-field equal corpus, and serializing again reproduces the same
/// bytes. Columns this model does not carry are emitted as `_`.
pub fn serialize_conllu(corpus: &TranscriptCorpus) -> String {
    use fmt::Write;
    let mut out = String::new();
    for participant in &corpus.participants {
        for response in &participant.responses {
            writeln!(out, "# participant_id = {}", response.participant_id).unwrap();
            writeln!(out, "# group = {}", participant.group).unwrap();
            writeln!(out, "# question_id = {}", response.question_id).unwrap();
            write_sentences(&mut out, &response.sentences);
        }
    }
    out
}

/// Serializes a reference corpus to CoNLL-U, one `doc_id` block per document.
pub fn serialize_reference_conllu(docs: &[ReferenceDocument]) -> String {
    use fmt::Write;
    let mut out = String::new();
    for doc in docs {
        writeln!(out, "# doc_id = {}", doc.doc_id).unwrap();
        write_sentences(&mut out, &doc.sentences);
    }
    out
}

// Rebuilds a sentence from the surviving tokens: indices are renumbered
// 1..n, heads pointing at survivors follow them, heads pointing at
// removed tokens detach to 0.
fn rebuild(sentence: &[Token], keep: &[bool]) -> Sentence {
    let mut new_index = vec![0usize; sentence.len() + 1];
    let mut next = 0usize;
    for (i, kept) in keep.iter().enumerate() {
        if *kept {
            next += 1;
            new_index[i + 1] = next;
        }
    }
    sentence
        .iter()
        .zip(keep)
        .filter(|(_, kept)| **kept)
        .map(|(token, _)| Token {
            index: new_index[token.index],
            head: if token.head == 0 {
                0
            } else {
                new_index[token.head]
            },
            ..token.clone()
        })
        .collect()
}

/// Removes every token tagged as punctuation.
///
/// Order is preserved; heads that pointed at a removed token detach to
/// root. Sentences may come out empty.
pub fn strip_punctuation(response: &Response) -> Response {
    let sentences = response
        .sentences
        .iter()
        .map(|sentence| {
            let keep: Vec<bool> = sentence.iter().map(|t| t.upos != PUNCT_TAG).collect();
            rebuild(sentence, &keep)
        })
        .collect();
    Response {
        participant_id: response.participant_id.clone(),
        question_id: response.question_id.clone(),
        sentences,
    }
}

/// Collapses every run of consecutive identical surface forms to its
/// first token, within a sentence.
///
/// Comparison is case-sensitive and the operation is idempotent. Heads
/// pointing at a removed duplicate detach to root.
pub fn collapse_repeats(response: &Response) -> Response {
    let sentences = response
        .sentences
        .iter()
        .map(|sentence| {
            let keep: Vec<bool> = sentence
                .iter()
                .enumerate()
                .map(|(i, t)| i == 0 || sentence[i - 1].form != t.form)
                .collect();
            rebuild(sentence, &keep)
        })
        .collect();
    Response {
        participant_id: response.participant_id.clone(),
        question_id: response.question_id.clone(),
        sentences,
    }
}

/// The fixed preprocessing order: punctuation stripping, then repeat
/// collapsing. Length filters count words on this output.
pub fn preprocess(response: &Response) -> Response {
    collapse_repeats(&strip_punctuation(response))
}

/// Selects the responses to the given questions whose preprocessed word
/// count reaches `min_words`. Returns the responses as stored, not their
/// preprocessed form.
pub fn filter_responses<'a>(
    corpus: &'a TranscriptCorpus,
    questions: &HashSet<String>,
    min_words: usize,
) -> Vec<&'a Response> {
    corpus
        .participants
        .iter()
        .flat_map(|p| eligible_responses(&p.responses, questions, min_words))
        .collect()
}

/// Per-participant counterpart of [`filter_responses`].
pub fn eligible_responses<'a>(
    responses: &'a [Response],
    questions: &HashSet<String>,
    min_words: usize,
) -> Vec<&'a Response> {
    responses
        .iter()
        .filter(|r| questions.contains(&r.question_id))
        .filter(|r| preprocess(r).word_count() >= min_words)
        .collect()
}

/// Mean word count per (question, group), averaged over the participants
/// in the group who answered that question. Counts are raw token counts
/// of the responses as transcribed. A participant with several responses
/// to one question contributes their total.
pub fn word_counts_by_question(corpus: &TranscriptCorpus) -> BTreeMap<(String, Group), f64> {
    let mut sums: BTreeMap<(String, Group), (usize, usize)> = BTreeMap::new();
    for participant in &corpus.participants {
        let mut per_question: BTreeMap<&str, usize> = BTreeMap::new();
        for response in &participant.responses {
            *per_question.entry(&response.question_id).or_insert(0) += response.word_count();
        }
        for (question, count) in per_question {
            let slot = sums
                .entry((question.to_string(), participant.group))
                .or_insert((0, 0));
            slot.0 += count;
            slot.1 += 1;
        }
    }
    sums.into_iter()
        .map(|(key, (total, n))| (key, total as f64 / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn token(index: usize, form: &str, upos: &str, head: usize) -> Token {
        Token {
            index,
            form: form.to_string(),
            lemma: form.to_lowercase(),
            upos: upos.to_string(),
            head,
            deprel: if head == 0 {
                "root".into()
            } else {
                "dep".into()
            },
        }
    }

    fn response_of(forms: &[&[(&str, &str, usize)]]) -> Response {
        Response {
            participant_id: "p".into(),
            question_id: "q".into(),
            sentences: forms
                .iter()
                .map(|sentence| {
                    sentence
                        .iter()
                        .enumerate()
                        .map(|(i, (form, upos, head))| token(i + 1, form, upos, *head))
                        .collect()
                })
                .collect(),
        }
    }

    const TWO_SENTENCES: &str = "\
# participant_id = p1
# group = patient
# question_id = q2
1\tHello\thello\tINTJ\t_\t_\t0\troot\t_\t_
2\tworld\tworld\tNOUN\t_\t_\t1\tvocative\t_\t_

1\tBye\tbye\tINTJ\t_\t_\t0\troot\t_\t_
";

    #[test]
    fn parse_empty_stream() {
        let corpus = parse_conllu("".as_bytes()).unwrap();
        assert!(corpus.participants.is_empty());
    }

    #[test]
    fn parse_single_response() {
        let corpus = parse_conllu(TWO_SENTENCES.as_bytes()).unwrap();
        assert_eq!(corpus.participants.len(), 1);
        let p = &corpus.participants[0];
        assert_eq!(p.id, "p1");
        assert_eq!(p.group, Group::Patient);
        assert_eq!(p.responses.len(), 1);
        let r = &p.responses[0];
        assert_eq!(r.question_id, "q2");
        assert_eq!(r.sentences.len(), 2);
        assert_eq!(r.word_count(), 3);
        let t = &r.sentences[0][1];
        assert_eq!(t.form, "world");
        assert_eq!(t.lemma, "world");
        assert_eq!(t.upos, "NOUN");
        assert_eq!(t.head, 1);
        assert_eq!(t.deprel, "vocative");
    }

    #[test]
    fn parse_wrong_column_count_names_line() {
        let input = "# participant_id = p\n# group = control\n1\ta\ta\tX\t_\t_\t0\troot\t_\n";
        match parse_conllu(input.as_bytes()) {
            Err(ParseError::ColumnCount { line: 3, found: 9 }) => {}
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn parse_requires_participant_and_group() {
        let no_pid = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n";
        assert!(matches!(
            parse_conllu(no_pid.as_bytes()),
            Err(ParseError::MissingParticipantId { line: 1 })
        ));
        let no_group = "# participant_id = p\n1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n";
        assert!(matches!(
            parse_conllu(no_group.as_bytes()),
            Err(ParseError::MissingGroup { line: 2 })
        ));
    }

    #[test]
    fn parse_rejects_unknown_group() {
        let input = "# participant_id = p\n# group = cohort\n";
        assert!(matches!(
            parse_conllu(input.as_bytes()),
            Err(ParseError::BadGroup { line: 2, .. })
        ));
    }

    #[test]
    fn parse_skips_multiword_ranges_and_empty_nodes() {
        let input = "\
# participant_id = p
# group = control
1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_
1\tde\tde\tADP\t_\t_\t2\tcase\t_\t_
2\tel\tel\tDET\t_\t_\t0\troot\t_\t_
2.1\tnull\tnull\t_\t_\t_\t_\t_\t_\t_
";
        let corpus = parse_conllu(input.as_bytes()).unwrap();
        assert_eq!(corpus.participants[0].responses[0].word_count(), 2);
    }

    #[test]
    fn parse_rejects_self_head_and_out_of_range_head() {
        let self_head = "# participant_id = p\n# group = control\n1\ta\ta\tX\t_\t_\t1\tdep\t_\t_\n";
        assert!(matches!(
            parse_conllu(self_head.as_bytes()),
            Err(ParseError::SelfHead { line: 3 })
        ));
        let far_head = "# participant_id = p\n# group = control\n1\ta\ta\tX\t_\t_\t9\tdep\t_\t_\n";
        assert!(matches!(
            parse_conllu(far_head.as_bytes()),
            Err(ParseError::HeadOutOfRange {
                line: 3,
                head: 9,
                len: 1
            })
        ));
    }

    #[test]
    fn parse_groups_consecutive_sentences_until_metadata() {
        let input = format!(
            "{TWO_SENTENCES}\n# question_id = q3\n1\tMore\tmore\tADV\t_\t_\t0\troot\t_\t_\n"
        );
        let corpus = parse_conllu(input.as_bytes()).unwrap();
        let p = &corpus.participants[0];
        assert_eq!(p.responses.len(), 2);
        assert_eq!(p.responses[0].question_id, "q2");
        assert_eq!(p.responses[1].question_id, "q3");
    }

    #[test]
    fn parse_detects_group_conflict() {
        let input = "\
# participant_id = p
# group = control
1\ta\ta\tX\t_\t_\t0\troot\t_\t_

# participant_id = p
# group = patient
1\tb\tb\tX\t_\t_\t0\troot\t_\t_
";
        assert!(matches!(
            parse_conllu(input.as_bytes()),
            Err(ParseError::GroupConflict { .. })
        ));
    }

    #[test]
    fn roundtrip_parse_serialize_parse() {
        let input = format!(
            "{TWO_SENTENCES}\n# participant_id = p2\n# group = control\n# question_id = q2\n1\tYes\tyes\tINTJ\t_\t_\t0\troot\t_\t_\n"
        );
        let first = parse_conllu(input.as_bytes()).unwrap();
        let emitted = serialize_conllu(&first);
        let second = parse_conllu(emitted.as_bytes()).unwrap();
        assert_eq!(first, second);
        assert_eq!(emitted, serialize_conllu(&second));
    }

    #[test]
    fn roundtrip_separates_same_question_responses() {
        let corpus = TranscriptCorpus {
            participants: vec![Participant {
                id: "p".into(),
                group: Group::Control,
                responses: vec![
                    response_of(&[&[("a", "NOUN", 0)]]),
                    response_of(&[&[("b", "NOUN", 0)]]),
                ],
            }],
        };
        let reparsed = parse_conllu(serialize_conllu(&corpus).as_bytes()).unwrap();
        assert_eq!(reparsed.participants[0].responses.len(), 2);
    }

    #[test]
    fn reference_documents_split_on_doc_id() {
        let input = "\
# doc_id = d1
1\told\told\tADJ\t_\t_\t2\tamod\t_\t_
2\tviolin\tviolin\tNOUN\t_\t_\t0\troot\t_\t_

# doc_id = d2
1\tviolin\tviolin\tNOUN\t_\t_\t0\troot\t_\t_
";
        let docs = parse_reference_conllu(input.as_bytes()).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].doc_id, "d1");
        assert_eq!(docs[0].sentences.len(), 1);
        let bytes = serialize_reference_conllu(&docs);
        assert_eq!(parse_reference_conllu(bytes.as_bytes()).unwrap(), docs);
    }

    #[test]
    fn reference_rejects_duplicates_and_stray_tokens() {
        let dup = "# doc_id = d\n\n# doc_id = d\n";
        assert!(matches!(
            parse_reference_conllu(dup.as_bytes()),
            Err(ParseError::DuplicateDocId(_))
        ));
        let stray = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n";
        assert!(matches!(
            parse_reference_conllu(stray.as_bytes()),
            Err(ParseError::MissingDocId { line: 1 })
        ));
    }

    #[test]
    fn strip_punctuation_removes_and_detaches() {
        // [NOUN, PUNCT, VERB] where the VERB hangs off the PUNCT token.
        let r = response_of(&[&[("cat", "NOUN", 0), (",", "PUNCT", 1), ("ran", "VERB", 2)]]);
        let stripped = strip_punctuation(&r);
        let sentence = &stripped.sentences[0];
        assert_eq!(
            sentence.iter().map(|t| t.form.as_str()).collect::<Vec<_>>(),
            ["cat", "ran"]
        );
        assert_eq!(sentence[0].index, 1);
        assert_eq!(sentence[1].index, 2);
        assert_eq!(sentence[1].head, 0, "head pointed at removed token");
    }

    #[test]
    fn strip_punctuation_remaps_surviving_heads() {
        let r = response_of(&[&[(",", "PUNCT", 0), ("big", "ADJ", 3), ("dog", "NOUN", 0)]]);
        let sentence = &strip_punctuation(&r).sentences[0];
        assert_eq!(sentence[0].form, "big");
        assert_eq!(sentence[0].index, 1);
        assert_eq!(sentence[0].head, 2, "head follows the surviving noun");
    }

    #[test]
    fn strip_punctuation_identity_and_annihilation() {
        let clean = response_of(&[&[("a", "NOUN", 0), ("b", "VERB", 1)]]);
        assert_eq!(strip_punctuation(&clean), clean);
        let all_punct = response_of(&[&[(".", "PUNCT", 0), ("!", "PUNCT", 0)]]);
        let stripped = strip_punctuation(&all_punct);
        assert_eq!(stripped.sentences.len(), 1);
        assert!(stripped.sentences[0].is_empty());
        assert_eq!(stripped.word_count(), 0);
    }

    #[test]
    fn collapse_repeats_examples() {
        let doubled = response_of(&[&[("quickly", "ADV", 0), ("quickly", "ADV", 1)]]);
        let collapsed = collapse_repeats(&doubled);
        assert_eq!(collapsed.word_count(), 1);
        assert_eq!(collapsed.sentences[0][0].form, "quickly");

        let run = response_of(&[&[("a", "X", 0), ("a", "X", 1), ("a", "X", 2), ("b", "X", 3)]]);
        let collapsed = collapse_repeats(&run);
        assert_eq!(
            collapsed.sentences[0]
                .iter()
                .map(|t| t.form.as_str())
                .collect::<Vec<_>>(),
            ["a", "b"]
        );
        // "b" hung off a removed duplicate: detached.
        assert_eq!(collapsed.sentences[0][1].head, 0);

        let alternating = response_of(&[&[("a", "X", 0), ("b", "X", 1), ("a", "X", 2)]]);
        assert_eq!(collapse_repeats(&alternating), alternating);
    }

    #[test]
    fn collapse_repeats_is_case_sensitive_and_sentence_local() {
        let cased = response_of(&[&[("Ha", "X", 0), ("ha", "X", 0)]]);
        assert_eq!(collapse_repeats(&cased).word_count(), 2);
        let across = response_of(&[&[("ha", "X", 0)], &[("ha", "X", 0)]]);
        assert_eq!(collapse_repeats(&across).word_count(), 2);
    }

    #[test]
    fn filter_responses_threshold() {
        let mut short = Vec::new();
        for i in 0..49 {
            short.push((format!("w{i}"), "NOUN", 0usize));
        }
        let short_refs: Vec<(&str, &str, usize)> =
            short.iter().map(|(f, u, h)| (f.as_str(), *u, *h)).collect();
        let corpus = TranscriptCorpus {
            participants: vec![Participant {
                id: "p".into(),
                group: Group::Control,
                responses: vec![Response {
                    question_id: "1".into(),
                    ..response_of(&[&short_refs])
                }],
            }],
        };
        let questions: HashSet<String> = ["1".to_string()].into();
        assert!(filter_responses(&corpus, &questions, 50).is_empty());
        assert_eq!(filter_responses(&corpus, &questions, 49).len(), 1);
        assert_eq!(filter_responses(&corpus, &questions, 0).len(), 1);
        let disjoint: HashSet<String> = ["9".to_string()].into();
        assert!(filter_responses(&corpus, &disjoint, 0).is_empty());
    }

    #[test]
    fn filter_counts_preprocessed_words() {
        // 3 raw tokens, but PUNCT + doubled form leave only 1 word.
        let r = Response {
            question_id: "1".into(),
            ..response_of(&[&[("uh", "X", 0), ("uh", "X", 0), (".", "PUNCT", 0)]])
        };
        let corpus = TranscriptCorpus {
            participants: vec![Participant {
                id: "p".into(),
                group: Group::Control,
                responses: vec![r],
            }],
        };
        let questions: HashSet<String> = ["1".to_string()].into();
        assert!(filter_responses(&corpus, &questions, 2).is_empty());
        assert_eq!(filter_responses(&corpus, &questions, 1).len(), 1);
    }

    #[test]
    fn word_counts_by_question_means() {
        let mk = |id: &str, group, words: usize| Participant {
            id: id.into(),
            group,
            responses: vec![Response {
                participant_id: id.into(),
                question_id: "q1".into(),
                sentences: vec![(0..words).map(|i| token(i + 1, "w", "NOUN", 0)).collect()],
            }],
        };
        let corpus = TranscriptCorpus {
            participants: vec![
                mk("c1", Group::Control, 10),
                mk("c2", Group::Control, 20),
                mk("p1", Group::Patient, 4),
            ],
        };
        let table = word_counts_by_question(&corpus);
        assert_eq!(table[&("q1".to_string(), Group::Control)], 15.0);
        assert_eq!(table[&("q1".to_string(), Group::Patient)], 4.0);
        assert!(word_counts_by_question(&TranscriptCorpus::default()).is_empty());
    }
}
