//! Machine-readable outputs: the per-line counts CSV, the roster CSV, the
//! cohort summary CSV, topic CSVs, and the full JSON report. All writers
//! emit `\n` line endings and deterministic ordering.

use std::collections::HashMap;

use serde::Serialize;

use crate::pipeline::{CohortSummary, InterviewReport, PipelineError};
use crate::topics::{CorpusMatrix, TopicSentiment};
use crate::transcript::ParticipantRecord;
use crate::TopicModel;

fn csv_string<F>(write: F) -> String
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    write(&mut writer).expect("csv write to memory");
    String::from_utf8(writer.into_inner().expect("csv flush")).expect("csv is utf-8")
}

/// Per-interview counts of per-line labels, one row per interview, rows
/// sorted by transcript id.
pub fn counts_csv(reports: &[InterviewReport]) -> String {
    let mut sorted: Vec<&InterviewReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.transcript_id.cmp(&b.transcript_id));
    csv_string(|w| {
        w.write_record(["name", "neg_count", "pos_count", "neutral_count", "error_count"])?;
        for r in sorted {
            w.write_record([
                r.pseudonym.as_str(),
                &r.counts.neg.to_string(),
                &r.counts.pos.to_string(),
                &r.counts.neutral.to_string(),
                &r.counts.error.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Participant roster with document-level sentiment, grouped by cohort and
/// numbered from 1 within each cohort.
pub fn roster_csv(
    reports: &[InterviewReport],
    meta: &[ParticipantRecord],
) -> Result<String, PipelineError> {
    let by_id: HashMap<&str, &ParticipantRecord> =
        meta.iter().map(|m| (m.id.as_str(), m)).collect();
    let mut rows: Vec<(&ParticipantRecord, &InterviewReport)> = Vec::new();
    for report in reports {
        let record = by_id
            .get(report.transcript_id.as_str())
            .ok_or_else(|| PipelineError::MissingMetadata(report.transcript_id.clone()))?;
        rows.push((record, report));
    }
    rows.sort_by_key(|(record, report)| (record.cohort, report.transcript_id.clone()));

    Ok(csv_string(|w| {
        w.write_record(["no", "gender", "name", "origin", "reason", "sentiment"])?;
        let mut cohort = None;
        let mut no = 0usize;
        for (record, report) in rows {
            if cohort != Some(record.cohort) {
                cohort = Some(record.cohort);
                no = 0;
            }
            no += 1;
            w.write_record([
                no.to_string().as_str(),
                &record.gender.to_string(),
                &record.pseudonym,
                &record.origin,
                &record.reason,
                &report.document_label.to_string(),
            ])?;
        }
        Ok(())
    }))
}

pub fn cohorts_csv(summaries: &[CohortSummary]) -> String {
    csv_string(|w| {
        w.write_record(["cohort", "n", "pos", "neg", "neutral", "error"])?;
        for s in summaries {
            w.write_record([
                s.cohort.to_string().as_str(),
                &s.n.to_string(),
                &s.pos.to_string(),
                &s.neg.to_string(),
                &s.neutral.to_string(),
                &s.error.to_string(),
            ])?;
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct FullReport<'a> {
    interviews: Vec<&'a InterviewReport>,
}

/// Full JSON report: one entry per interview with per-answer labels and
/// scores, sorted by transcript id.
pub fn full_json(reports: &[InterviewReport]) -> String {
    let mut sorted: Vec<&InterviewReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.transcript_id.cmp(&b.transcript_id));
    let mut out =
        serde_json::to_string_pretty(&FullReport { interviews: sorted }).expect("report is serializable");
    out.push('\n');
    out
}

/// Top-word listing per topic: `topic,rank,token,weight`.
pub fn topic_words_csv(model: &TopicModel, corpus: &CorpusMatrix, top_n: usize) -> String {
    csv_string(|w| {
        w.write_record(["topic", "rank", "token", "weight"])?;
        for topic in 0..model.k {
            let words =
                crate::topics::top_words(model, corpus, topic, top_n).expect("topic id in range");
            for (rank, token) in words.iter().enumerate() {
                let word_id = corpus
                    .vocab
                    .iter()
                    .position(|v| v == token)
                    .expect("token from vocab");
                w.write_record([
                    topic.to_string().as_str(),
                    &(rank + 1).to_string(),
                    token,
                    &format!("{:.6}", model.topic_word_weight(topic, word_id)),
                ])?;
            }
        }
        Ok(())
    })
}

pub fn topic_sentiment_csv(stratified: &[TopicSentiment]) -> String {
    csv_string(|w| {
        w.write_record(["topic", "pos", "neg"])?;
        for t in stratified {
            w.write_record([
                t.topic.to_string().as_str(),
                &t.pos.to_string(),
                &t.neg.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Per-sweep perplexity trace: `sweep,perplexity`.
pub fn perplexity_csv(trace: &[(usize, f64)]) -> String {
    csv_string(|w| {
        w.write_record(["sweep", "perplexity"])?;
        for (sweep, p) in trace {
            w.write_record([sweep.to_string().as_str(), &format!("{p:.6}")])?;
        }
        Ok(())
    })
}
