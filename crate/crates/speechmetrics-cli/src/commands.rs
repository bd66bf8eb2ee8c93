//! The four pipeline commands. Each one loads its inputs, writes its
//! artifacts into the output directory, and reports warnings on stderr
//! and in `run_log.txt`. Runs are deterministic: the same inputs and
//! seed reproduce every artifact byte for byte.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context, Result};

use speechmetrics::classify::{
    build_feature_vectors, train_eval, Hyperparams, ParticipantScoreSet, FEATURE_NAMES,
};
use speechmetrics::corpus::{
    parse_conllu, parse_reference_conllu, word_counts_by_question, Group, ReferenceDocument,
    TranscriptCorpus,
};
use speechmetrics::derailment::{participant_derailment, DerailmentConfig, WordFilter};
use speechmetrics::embeddings::{coverage, load_vectors, EmbeddingTable};
use speechmetrics::modifier_coherence::{
    build_reference_stats, observed_modifier_heads, participant_modifier_scores, QualifiedCounts,
};
use speechmetrics::stats;

use crate::config::RunConfig;
use crate::output::{self, CsvFile, RunLog};

fn load_corpus(path: &Path) -> Result<TranscriptCorpus> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_conllu(BufReader::new(file))
        .with_context(|| format!("cannot parse transcripts {}", path.display()))
}

fn load_table(path: &Path) -> Result<EmbeddingTable> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    load_vectors(BufReader::new(file))
        .with_context(|| format!("cannot parse vectors {}", path.display()))
}

fn load_reference(paths: &[std::path::PathBuf]) -> Result<Vec<ReferenceDocument>> {
    if paths.is_empty() {
        bail!("a reference corpus is required: pass --reference at least once");
    }
    let mut docs = Vec::new();
    for path in paths {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        let parsed = parse_reference_conllu(BufReader::new(file))
            .with_context(|| format!("cannot parse reference {}", path.display()))?;
        docs.extend(parsed);
    }
    Ok(docs)
}

fn prepare(config: &RunConfig) -> Result<(TranscriptCorpus, EmbeddingTable, RunLog)> {
    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("cannot create {}", config.out.display()))?;
    let corpus = load_corpus(&config.transcripts)?;
    let table = load_table(&config.vectors)?;
    let mut log = RunLog::new(&config.out);
    log.info(format!(
        "vocabulary coverage: {}",
        output::full(coverage(&table, &corpus))
    ));
    Ok((corpus, table, log))
}

/// Welch comparison of two score lists, degrading to blanks: a mean
/// needs one value, an SD two, and the test two per side.
struct ComparisonRow {
    control_mean: Option<f64>,
    control_sd: Option<f64>,
    patient_mean: Option<f64>,
    patient_sd: Option<f64>,
    t: Option<f64>,
    p: Option<f64>,
}

fn compare_groups(
    control: &[f64],
    patient: &[f64],
    label: &str,
    log: &mut RunLog,
) -> ComparisonRow {
    let summarize = |values: &[f64]| match stats::mean_sd(values) {
        Ok((mean, sd)) => (Some(mean), sd),
        Err(_) => (None, None),
    };
    let (control_mean, control_sd) = summarize(control);
    let (patient_mean, patient_sd) = summarize(patient);
    let (t, p) = if control.len() < 2 || patient.len() < 2 {
        log.warn(format!(
            "{label}: insufficient data for a group comparison \
             ({} control, {} patient scores)",
            control.len(),
            patient.len()
        ));
        (None, None)
    } else {
        match stats::welch_t(control, patient) {
            Ok(result) => (Some(result.t), Some(result.p)),
            Err(err) => {
                log.warn(format!("{label}: {err}"));
                (None, None)
            }
        }
    };
    ComparisonRow {
        control_mean,
        control_sd,
        patient_mean,
        patient_sd,
        t,
        p,
    }
}

pub fn cmd_derail(config: &RunConfig) -> Result<()> {
    let (corpus, table, mut log) = prepare(config)?;
    let questions = config.question_set();

    let mut participants_csv = CsvFile::new(
        &config.out,
        "derailment_participants.csv",
        &["participant", "k", "filter", "score", "n_responses"],
    )?;
    let mut groups_csv = CsvFile::new(
        &config.out,
        "derailment_groups.csv",
        &[
            "k",
            "filter",
            "control_mean",
            "control_sd",
            "patient_mean",
            "patient_sd",
            "t",
            "p",
        ],
    )?;
    let mut series_csv = CsvFile::new(
        &config.out,
        "derailment_series.csv",
        &["k", "filter", "group", "mean_score"],
    )?;

    let mut any_rows = false;
    for &k in &config.k_values {
        for &filter in &config.filters {
            let dconfig = DerailmentConfig {
                k,
                word_filter: filter,
                min_words: config.min_words,
                questions: questions.clone(),
            };
            let mut control = Vec::new();
            let mut patient = Vec::new();
            for participant in &corpus.participants {
                let Some(score) = participant_derailment(participant, &dconfig, &table) else {
                    continue;
                };
                any_rows = true;
                participants_csv.row([
                    participant.id.clone(),
                    k.to_string(),
                    filter.as_str().to_string(),
                    output::full(score.value),
                    score.n_responses.to_string(),
                ])?;
                match participant.group {
                    Group::Control => control.push(score.value),
                    Group::Patient => patient.push(score.value),
                }
            }
            let label = format!("k={k} filter={}", filter.as_str());
            let row = compare_groups(&control, &patient, &label, &mut log);
            groups_csv.row([
                k.to_string(),
                filter.as_str().to_string(),
                output::opt(row.control_mean),
                output::opt(row.control_sd),
                output::opt(row.patient_mean),
                output::opt(row.patient_sd),
                output::opt(row.t),
                output::opt(row.p),
            ])?;
            for (group, mean) in [
                (Group::Control, row.control_mean),
                (Group::Patient, row.patient_mean),
            ] {
                series_csv.row([
                    k.to_string(),
                    filter.as_str().to_string(),
                    group.as_str().to_string(),
                    output::opt(mean),
                ])?;
            }
        }
    }
    if !any_rows {
        log.warn("no participant reached the scoring criteria; participants table is empty");
    }

    participants_csv.finish()?;
    groups_csv.finish()?;
    series_csv.finish()?;
    log.finish()
}

pub fn cmd_stats(config: &RunConfig) -> Result<()> {
    let (corpus, table, log) = prepare(config)?;

    let mut counts_csv = CsvFile::new(
        &config.out,
        "word_counts.csv",
        &["question", "group", "mean_words"],
    )?;
    for ((question, group), mean) in word_counts_by_question(&corpus) {
        counts_csv.row([question, group.as_str().to_string(), output::full(mean)])?;
    }
    counts_csv.finish()?;

    output::write_text(
        &config.out.join("coverage.txt"),
        &output::full(coverage(&table, &corpus)),
    )?;
    log.finish()
}

pub fn cmd_incohere(config: &RunConfig) -> Result<()> {
    let (corpus, table, mut log) = prepare(config)?;
    let docs = load_reference(&config.reference)?;
    let stats_ref = build_reference_stats(&docs)?;
    if stats_ref.modifier_count() == 0 {
        log.warn("reference corpus contributed no modifier pairs; every score will be absent");
    }
    let observed = observed_modifier_heads(&corpus);

    let mut scores_csv = CsvFile::new(
        &config.out,
        "modifier_scores.csv",
        &["participant", "adjective_score", "adverb_score"],
    )?;
    let mut per_class: [(Vec<f64>, Vec<f64>); 2] = Default::default();
    let mut counts_by_group = [QualifiedCounts::default(), QualifiedCounts::default()];

    for participant in &corpus.participants {
        let scores = participant_modifier_scores(participant, &stats_ref, &table, &observed);
        scores_csv.row([
            participant.id.clone(),
            output::opt(scores.adjective_score),
            output::opt(scores.adverb_score),
        ])?;
        let group_slot = participant.group as usize;
        for (class_slot, value) in [scores.adjective_score, scores.adverb_score]
            .into_iter()
            .enumerate()
        {
            if let Some(v) = value {
                let buckets = &mut per_class[class_slot];
                match participant.group {
                    Group::Control => buckets.0.push(v),
                    Group::Patient => buckets.1.push(v),
                }
            }
        }
        counts_by_group[group_slot].add(&scores.counts);
    }
    scores_csv.finish()?;

    let mut groups_csv = CsvFile::new(
        &config.out,
        "modifier_groups.csv",
        &[
            "class",
            "control_mean",
            "control_sd",
            "patient_mean",
            "patient_sd",
            "t",
            "p",
        ],
    )?;
    for (class_slot, class) in ["adjective", "adverb"].into_iter().enumerate() {
        let (control, patient) = &per_class[class_slot];
        let row = compare_groups(control, patient, class, &mut log);
        groups_csv.row([
            class.to_string(),
            output::opt(row.control_mean),
            output::opt(row.control_sd),
            output::opt(row.patient_mean),
            output::opt(row.patient_sd),
            output::opt(row.t),
            output::opt(row.p),
        ])?;
    }
    groups_csv.finish()?;

    let mut counts_csv = CsvFile::new(
        &config.out,
        "qualified_counts.csv",
        &["group", "pos_class", "total", "qualified"],
    )?;
    for group in [Group::Control, Group::Patient] {
        let counts = &counts_by_group[group as usize];
        for (pos_class, total, qualified) in [
            ("noun", counts.nouns_total, counts.nouns_qualified),
            (
                "adjective",
                counts.adjectives_total,
                counts.adjectives_qualified,
            ),
            ("verb", counts.verbs_total, counts.verbs_qualified),
            ("adverb", counts.adverbs_total, counts.adverbs_qualified),
        ] {
            counts_csv.row([
                group.as_str().to_string(),
                pos_class.to_string(),
                total.to_string(),
                qualified.to_string(),
            ])?;
        }
    }
    counts_csv.finish()?;
    log.finish()
}

pub fn cmd_classify(config: &RunConfig) -> Result<()> {
    let (corpus, table, mut log) = prepare(config)?;
    let docs = load_reference(&config.reference)?;
    let stats_ref = build_reference_stats(&docs)?;
    let observed = observed_modifier_heads(&corpus);
    let questions = config.question_set();

    let mut sets: Vec<ParticipantScoreSet> = corpus
        .participants
        .iter()
        .map(|p| ParticipantScoreSet::new(p.id.clone(), p.group))
        .collect();

    for filter in [WordFilter::AllWords, WordFilter::ContentOnly] {
        for k in 1..=5 {
            let dconfig = DerailmentConfig {
                k,
                word_filter: filter,
                min_words: config.min_words,
                questions: questions.clone(),
            };
            for (set, participant) in sets.iter_mut().zip(&corpus.participants) {
                let value =
                    participant_derailment(participant, &dconfig, &table).map(|score| score.value);
                match filter {
                    WordFilter::AllWords => set.derail_all[k - 1] = value,
                    WordFilter::ContentOnly => set.derail_content[k - 1] = value,
                }
            }
        }
    }
    for (set, participant) in sets.iter_mut().zip(&corpus.participants) {
        let scores = participant_modifier_scores(participant, &stats_ref, &table, &observed);
        set.adj_similarity = scores.adjective_score;
        set.adv_similarity = scores.adverb_score;
    }

    let vectors = build_feature_vectors(&sets)?;
    for vector in &vectors {
        for (index, imputed) in vector.imputed_mask.iter().enumerate() {
            if *imputed {
                log.warn(format!(
                    "participant {}: feature {} imputed with the cohort mean {}",
                    vector.participant_id,
                    FEATURE_NAMES[index],
                    output::full(vector.features[index])
                ));
            }
        }
    }

    let mut header = vec!["participant_id", "label"];
    header.extend(FEATURE_NAMES);
    let mut features_csv = CsvFile::new(&config.out, "features.csv", &header)?;
    for vector in &vectors {
        let mut row = vec![
            vector.participant_id.clone(),
            vector.label.as_str().to_string(),
        ];
        row.extend(vector.features.iter().map(|v| output::full(*v)));
        features_csv.row(row)?;
    }
    features_csv.finish()?;

    let params = Hyperparams::default();
    output::print_summary_header();
    for &kind in &config.classifiers {
        let report = train_eval(kind, &vectors, config.folds, config.seed, &params)?;
        output::write_json(
            &config.out.join(format!("report_{}.json", kind.as_str())),
            &report,
        )?;
        output::print_summary_row(
            kind.as_str(),
            report.accuracy,
            report.precision,
            report.recall,
        );
    }
    log.finish()
}
