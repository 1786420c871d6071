//! Batch analysis of speaker-tagged interview transcripts: rule-based
//! valence-lexicon sentiment scoring, per-answer and per-interview labels,
//! cohort summaries, and topic inference over subjective answers.
//!
//! Scoring and topic inference are generic over the float type via
//! [`num_traits::Float`]; the aliases below fix `f64` for the pipeline
//! and CLI.

pub mod config;
pub mod pipeline;
pub mod report;
pub mod sentiment;
pub mod topics;
pub mod transcript;

/// Default-precision sentiment score used by the pipeline.
pub type Score = sentiment::SentimentScore<f64>;
/// Default-precision lexicon used by the pipeline.
pub type Lexicon = sentiment::Lexicon<f64>;
/// Default-precision fitted topic model used by the pipeline.
pub type TopicModel = topics::TopicModel<f64>;
