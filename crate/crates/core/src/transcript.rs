//! Transcript and participant-roster ingestion.
//!
//! Transcripts are line-oriented UTF-8 text with `I:` / `R:` speaker
//! prefixes; consecutive lines from the same speaker merge into one turn.
//! The roster is a CSV with header `id,pseudonym,gender,origin,reason,cohort`.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input is not valid UTF-8")]
    Decode,
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("transcript contains no turns")]
    EmptyTranscript,
    #[error("transcript contains no respondent turns")]
    NoRespondentTurns,
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
}

fn format_err(line: usize, message: impl Into<String>) -> IngestError {
    IngestError::Format {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Speaker {
    Interviewer,
    Respondent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Turn {
    pub speaker: Speaker,
    pub text: String,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Gender {
    M,
    F,
    Unspecified,
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gender::M => write!(f, "M"),
            Gender::F => write!(f, "F"),
            Gender::Unspecified => write!(f, "Unspecified"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Cohort {
    International,
    InterProvincial,
    NonMigrant,
}

impl Cohort {
    pub fn parse(s: &str) -> Option<Cohort> {
        match s {
            "International" => Some(Cohort::International),
            "InterProvincial" => Some(Cohort::InterProvincial),
            "NonMigrant" => Some(Cohort::NonMigrant),
            _ => None,
        }
    }
}

impl fmt::Display for Cohort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cohort::International => write!(f, "International"),
            Cohort::InterProvincial => write!(f, "InterProvincial"),
            Cohort::NonMigrant => write!(f, "NonMigrant"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParticipantRecord {
    pub id: String,
    pub pseudonym: String,
    pub gender: Gender,
    pub origin: String,
    pub reason: String,
    pub cohort: Cohort,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub id: String,
    pub turns: Vec<Turn>,
    /// Attached after the roster is loaded; `None` straight out of the parser.
    pub participant: Option<ParticipantRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Answer {
    pub transcript_id: String,
    pub turn_index: usize,
    pub text: String,
    pub word_count: usize,
}

/// Number of whitespace-delimited tokens; the unit of the short-answer filter.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Parse one transcript file. Consecutive lines with the same speaker
/// prefix merge into a single turn; blank lines are ignored.
pub fn parse_transcript<R: Read>(mut raw: R, id: &str) -> Result<Transcript, IngestError> {
    let mut bytes = Vec::new();
    raw.read_to_end(&mut bytes).map_err(|_| IngestError::Decode)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| IngestError::Decode)?;

    let mut turns: Vec<Turn> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (speaker, rest) = if let Some(rest) = line.strip_prefix("I:") {
            (Speaker::Interviewer, rest)
        } else if let Some(rest) = line.strip_prefix("R:") {
            (Speaker::Respondent, rest)
        } else {
            return Err(format_err(
                lineno + 1,
                format!("no recognized speaker prefix in {line:?}"),
            ));
        };
        let body = rest.trim();
        if body.is_empty() {
            return Err(format_err(lineno + 1, "turn has empty text"));
        }
        match turns.last_mut() {
            Some(last) if last.speaker == speaker => {
                last.text.push(' ');
                last.text.push_str(body);
            }
            _ => turns.push(Turn {
                speaker,
                text: body.to_string(),
                index: turns.len(),
            }),
        }
    }

    if turns.is_empty() {
        return Err(IngestError::EmptyTranscript);
    }
    if !turns.iter().any(|t| t.speaker == Speaker::Respondent) {
        return Err(IngestError::NoRespondentTurns);
    }
    Ok(Transcript {
        id: id.to_string(),
        turns,
        participant: None,
    })
}

impl Transcript {
    /// Inverse of [`parse_transcript`] up to whitespace normalization:
    /// parsing the output yields an identical transcript.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for turn in &self.turns {
            let prefix = match turn.speaker {
                Speaker::Interviewer => "I: ",
                Speaker::Respondent => "R: ",
            };
            out.push_str(prefix);
            out.push_str(&turn.text);
            out.push('\n');
        }
        out
    }
}

const METADATA_HEADER: [&str; 6] = ["id", "pseudonym", "gender", "origin", "reason", "cohort"];

/// Parse the participant roster CSV. Unknown gender strings map to
/// `Unspecified`; an unknown cohort is an error.
pub fn load_metadata<R: Read>(raw: R) -> Result<Vec<ParticipantRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(raw);
    let headers = reader
        .headers()
        .map_err(|e| format_err(1, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != METADATA_HEADER {
        return Err(format_err(
            1,
            format!("expected header {}", METADATA_HEADER.join(",")),
        ));
    }

    let mut seen: HashSet<String> = HashSet::new();
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let lineno = i + 2;
        let row = row.map_err(|e| format_err(lineno, e.to_string()))?;
        if row.len() != METADATA_HEADER.len() {
            return Err(format_err(lineno, "missing column"));
        }
        let id = row[0].trim().to_string();
        if id.is_empty() {
            return Err(format_err(lineno, "empty id"));
        }
        if !seen.insert(id.clone()) {
            return Err(IngestError::DuplicateId(id));
        }
        let gender = match row[2].trim() {
            "M" => Gender::M,
            "F" => Gender::F,
            _ => Gender::Unspecified,
        };
        let cohort = Cohort::parse(row[5].trim())
            .ok_or_else(|| format_err(lineno, format!("unknown cohort {:?}", &row[5])))?;
        records.push(ParticipantRecord {
            id,
            pseudonym: row[1].trim().to_string(),
            gender,
            origin: row[3].trim().to_string(),
            reason: row[4].trim().to_string(),
            cohort,
        });
    }
    Ok(records)
}

/// Keep only respondent turns, in transcript order.
pub fn strip_questions(t: &Transcript) -> Vec<Answer> {
    t.turns
        .iter()
        .filter(|turn| turn.speaker == Speaker::Respondent)
        .map(|turn| Answer {
            transcript_id: t.id.clone(),
            turn_index: turn.index,
            text: turn.text.clone(),
            word_count: word_count(&turn.text),
        })
        .collect()
}

/// Drop answers shorter than `min_words` whitespace tokens.
pub fn filter_short_answers(answers: Vec<Answer>, min_words: usize) -> Vec<Answer> {
    answers
        .into_iter()
        .filter(|a| a.word_count >= min_words)
        .collect()
}
