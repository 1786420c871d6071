//! Orchestration: per-answer labels, whole-interview reports, and cohort
//! summaries.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::sentiment::{
    classify_fine_with, classify_with_band, score_text, tokenize, CoarseLabel, FineLabel,
    DEFAULT_FINE_CUT, DEFAULT_NEUTRAL_BAND,
};
use crate::transcript::{
    filter_short_answers, strip_questions, Answer, Cohort, ParticipantRecord, Transcript,
};
use crate::{Lexicon, Score};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("no metadata record for transcript {0:?}")]
    MissingMetadata(String),
}

/// Classification thresholds; both bands apply to the compound score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub neutral_band: f64,
    pub fine_cut: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            neutral_band: DEFAULT_NEUTRAL_BAND,
            fine_cut: DEFAULT_FINE_CUT,
        }
    }
}

/// Source of the text scored for the whole-interview label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DocumentMode {
    /// Filtered answers joined by single spaces (the default).
    ConcatenatedAnswers,
    /// All turns, questions included, for comparison runs.
    RawTranscript,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    pub min_words: usize,
    pub thresholds: Thresholds,
    pub mode: DocumentMode,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            min_words: 3,
            thresholds: Thresholds::default(),
            mode: DocumentMode::ConcatenatedAnswers,
        }
    }
}

/// One answer with its score and labels. `score` and `fine` are absent
/// exactly when the answer produced no tokens and was labeled `Error`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledAnswer {
    pub answer: Answer,
    pub score: Option<Score>,
    pub coarse: CoarseLabel,
    pub fine: Option<FineLabel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SentimentCounts {
    pub neg: usize,
    pub pos: usize,
    pub neutral: usize,
    pub error: usize,
}

impl SentimentCounts {
    pub fn total(&self) -> usize {
        self.neg + self.pos + self.neutral + self.error
    }

    fn add(&mut self, label: CoarseLabel) {
        match label {
            CoarseLabel::Negative => self.neg += 1,
            CoarseLabel::Positive => self.pos += 1,
            CoarseLabel::Neutral => self.neutral += 1,
            CoarseLabel::Error => self.error += 1,
        }
    }
}

/// Whole-interview result: document-level label plus per-line counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterviewReport {
    pub transcript_id: String,
    pub pseudonym: String,
    pub document_label: CoarseLabel,
    pub counts: SentimentCounts,
    pub answers: Vec<LabeledAnswer>,
    pub neg_exceeds_pos: bool,
}

/// Counts of document-level labels within one cohort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CohortSummary {
    pub cohort: Cohort,
    pub n: usize,
    pub pos: usize,
    pub neg: usize,
    pub neutral: usize,
    pub error: usize,
}

/// Label one answer. An answer that tokenizes to nothing gets the `Error`
/// label; `Error` is never produced by classification itself.
pub fn analyze_answer(answer: Answer, lex: &Lexicon, thresholds: &Thresholds) -> LabeledAnswer {
    if tokenize(&answer.text).tokens.is_empty() {
        return LabeledAnswer {
            answer,
            score: None,
            coarse: CoarseLabel::Error,
            fine: None,
        };
    }
    let score = score_text(&answer.text, lex);
    LabeledAnswer {
        answer,
        score: Some(score),
        coarse: classify_with_band(&score, thresholds.neutral_band),
        fine: Some(classify_fine_with(
            &score,
            thresholds.neutral_band,
            thresholds.fine_cut,
        )),
    }
}

/// Analyze one transcript end to end. An interview whose every answer is
/// filtered out gets document label `Error` with all-zero counts.
pub fn analyze_document(t: &Transcript, lex: &Lexicon, opts: &AnalyzeOptions) -> InterviewReport {
    let answers = filter_short_answers(strip_questions(t), opts.min_words);
    let labeled: Vec<LabeledAnswer> = answers
        .into_iter()
        .map(|a| analyze_answer(a, lex, &opts.thresholds))
        .collect();

    let mut counts = SentimentCounts::default();
    for la in &labeled {
        counts.add(la.coarse);
    }

    let document_label = if labeled.is_empty() {
        CoarseLabel::Error
    } else {
        let text = match opts.mode {
            DocumentMode::ConcatenatedAnswers => labeled
                .iter()
                .map(|la| la.answer.text.as_str())
                .collect::<Vec<_>>()
                .join(" "),
            DocumentMode::RawTranscript => t
                .turns
                .iter()
                .map(|turn| turn.text.as_str())
                .collect::<Vec<_>>()
                .join(" "),
        };
        classify_with_band(&score_text(&text, lex), opts.thresholds.neutral_band)
    };

    InterviewReport {
        transcript_id: t.id.clone(),
        pseudonym: t
            .participant
            .as_ref()
            .map(|p| p.pseudonym.clone())
            .unwrap_or_else(|| t.id.clone()),
        document_label,
        neg_exceeds_pos: counts.neg > counts.pos,
        counts,
        answers: labeled,
    }
}

/// Tally document labels per cohort. Cohorts appear in enum order; only
/// cohorts with at least one report are listed.
pub fn summarize_cohorts(
    reports: &[InterviewReport],
    meta: &[ParticipantRecord],
) -> Result<Vec<CohortSummary>, PipelineError> {
    let by_id: HashMap<&str, Cohort> = meta.iter().map(|m| (m.id.as_str(), m.cohort)).collect();
    let mut tally: HashMap<Cohort, (usize, SentimentCounts)> = HashMap::new();
    for report in reports {
        let cohort = by_id
            .get(report.transcript_id.as_str())
            .copied()
            .ok_or_else(|| PipelineError::MissingMetadata(report.transcript_id.clone()))?;
        let entry = tally.entry(cohort).or_default();
        entry.0 += 1;
        entry.1.add(report.document_label);
    }
    let mut cohorts: Vec<Cohort> = tally.keys().copied().collect();
    cohorts.sort();
    Ok(cohorts
        .into_iter()
        .map(|cohort| {
            let (n, c) = tally[&cohort];
            CohortSummary {
                cohort,
                n,
                pos: c.pos,
                neg: c.neg,
                neutral: c.neutral,
                error: c.error,
            }
        })
        .collect())
}

/// Keep only answers with a polarized label, discarding Neutral and Error.
pub fn filter_subjective(answers: Vec<LabeledAnswer>) -> Vec<LabeledAnswer> {
    answers
        .into_iter()
        .filter(|la| matches!(la.coarse, CoarseLabel::Positive | CoarseLabel::Negative))
        .collect()
}
