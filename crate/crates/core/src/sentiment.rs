//! Rule-based valence-lexicon scoring.
//!
//! A text is tokenized, each token with a lexicon valence is adjusted for
//! nearby negators and boosters and for ALL-CAPS emphasis, the adjusted
//! valences are summed, and the sum is squashed into (-1, 1) with
//! `raw / sqrt(raw^2 + 15)`. Constants follow the published conventions
//! for this family of analyzers.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Read};

use num_traits::Float;
use serde::Serialize;
use thiserror::Error;

/// Scalar applied to a valence when a negator sits in the preceding window.
pub const NEGATION_SCALAR: f64 = -0.74;
/// Magnitude added toward the valence sign for an ALL-CAPS valence token.
pub const CAPS_INCREMENT: f64 = 0.733;
/// Magnitude added toward the raw sign per trailing exclamation mark.
pub const EXCLAMATION_INCREMENT: f64 = 0.292;
/// Per-step decay of a booster's increment beyond the nearest position.
pub const BOOSTER_DECAY: f64 = 0.95;
/// Normalization constant in `raw / sqrt(raw^2 + alpha)`.
pub const NORMALIZATION_ALPHA: f64 = 15.0;
/// Number of preceding tokens scanned for negators and boosters.
pub const MODIFIER_WINDOW: usize = 3;
/// Trailing exclamation marks counted at most this many times.
pub const MAX_EXCLAMATIONS: u32 = 3;

/// Default half-width of the neutral compound band.
pub const DEFAULT_NEUTRAL_BAND: f64 = 0.05;
/// Default compound magnitude separating "somewhat" from "very".
pub const DEFAULT_FINE_CUT: f64 = 0.6;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: duplicate token {token:?}")]
    DuplicateToken { line: usize, token: String },
    #[error("line {line}: non-finite value for {token:?}")]
    NonFiniteValue { line: usize, token: String },
}

/// Valence entries plus negator and booster token classes. A token belongs
/// to at most one class.
#[derive(Debug, Clone, Default)]
pub struct Lexicon<F> {
    pub entries: HashMap<String, F>,
    pub negators: HashSet<String>,
    pub boosters: HashMap<String, F>,
}

impl<F: Float> Lexicon<F> {
    /// Build a lexicon from in-memory parts, enforcing class disjointness
    /// and finiteness.
    pub fn from_parts(
        entries: HashMap<String, F>,
        negators: HashSet<String>,
        boosters: HashMap<String, F>,
    ) -> Result<Self, LexiconError> {
        for (token, v) in entries.iter().chain(boosters.iter()) {
            if !v.is_finite() {
                return Err(LexiconError::NonFiniteValue {
                    line: 0,
                    token: token.clone(),
                });
            }
        }
        for token in entries.keys() {
            if negators.contains(token) || boosters.contains_key(token) {
                return Err(LexiconError::DuplicateToken {
                    line: 0,
                    token: token.clone(),
                });
            }
        }
        for token in negators.iter() {
            if boosters.contains_key(token) {
                return Err(LexiconError::DuplicateToken {
                    line: 0,
                    token: token.clone(),
                });
            }
        }
        Ok(Lexicon {
            entries,
            negators,
            boosters,
        })
    }

    /// Parse the lexicon TSV: `token<TAB>class<TAB>value`, classes
    /// `valence` / `negator` / `booster`, `#` comment lines ignored.
    pub fn load<R: Read>(raw: R) -> Result<Self, LexiconError> {
        let reader = BufReader::new(raw);
        let mut lex = Lexicon {
            entries: HashMap::new(),
            negators: HashSet::new(),
            boosters: HashMap::new(),
        };
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| LexiconError::Format {
                line: lineno,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 3 {
                return Err(LexiconError::Format {
                    line: lineno,
                    message: format!("expected 3 tab-separated fields, got {}", fields.len()),
                });
            }
            let token = fields[0].trim().to_lowercase();
            if token.is_empty() {
                return Err(LexiconError::Format {
                    line: lineno,
                    message: "empty token".into(),
                });
            }
            let value: f64 = fields[2].trim().parse().map_err(|_| LexiconError::Format {
                line: lineno,
                message: format!("unparsable value {:?}", fields[2]),
            })?;
            if !value.is_finite() {
                return Err(LexiconError::NonFiniteValue {
                    line: lineno,
                    token,
                });
            }
            let taken = lex.entries.contains_key(&token)
                || lex.negators.contains(&token)
                || lex.boosters.contains_key(&token);
            if taken {
                return Err(LexiconError::DuplicateToken {
                    line: lineno,
                    token,
                });
            }
            let value_f = F::from(value).ok_or(LexiconError::NonFiniteValue {
                line: lineno,
                token: token.clone(),
            })?;
            match fields[1].trim() {
                "valence" => {
                    lex.entries.insert(token, value_f);
                }
                "negator" => {
                    lex.negators.insert(token);
                }
                "booster" => {
                    lex.boosters.insert(token, value_f);
                }
                other => {
                    return Err(LexiconError::Format {
                        line: lineno,
                        message: format!("unknown class {other:?}"),
                    });
                }
            }
        }
        Ok(lex)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Lowercased token with trailing punctuation stripped.
    pub text: String,
    /// Original token was written in ALL CAPS.
    pub all_caps: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tokenized {
    pub tokens: Vec<Token>,
    /// Trailing `!` count on the whole text, capped at [`MAX_EXCLAMATIONS`].
    pub exclamations: u32,
}

/// Whitespace tokenization with trailing-punctuation stripping and
/// emphasis marks. Tokens that are punctuation only are dropped.
pub fn tokenize(text: &str) -> Tokenized {
    let exclamations = (text
        .trim_end()
        .chars()
        .rev()
        .take_while(|c| *c == '!')
        .count() as u32)
        .min(MAX_EXCLAMATIONS);

    let tokens = text
        .split_whitespace()
        .filter_map(|raw| {
            let stripped = raw.trim_end_matches(|c: char| !c.is_alphanumeric());
            if stripped.is_empty() {
                return None;
            }
            let all_caps = stripped.chars().any(|c| c.is_alphabetic())
                && !stripped.chars().any(|c| c.is_lowercase());
            Some(Token {
                text: stripped.to_lowercase(),
                all_caps,
            })
        })
        .collect();

    Tokenized {
        tokens,
        exclamations,
    }
}

/// Signed valence sum and its normalized form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SentimentScore<F> {
    pub raw: F,
    /// `raw / sqrt(raw^2 + 15)`, always in (-1, 1).
    pub compound: F,
    pub pos_share: F,
    pub neg_share: F,
    pub neu_share: F,
}

impl<F: Float> SentimentScore<F> {
    pub fn neutral() -> Self {
        SentimentScore {
            raw: F::zero(),
            compound: F::zero(),
            pos_share: F::zero(),
            neg_share: F::zero(),
            neu_share: F::one(),
        }
    }
}

fn direction<F: Float>(v: F) -> F {
    if v > F::zero() {
        F::one()
    } else if v < F::zero() {
        -F::one()
    } else {
        F::zero()
    }
}

fn constant<F: Float>(c: f64) -> F {
    F::from(c).expect("float constant representable")
}

/// Score a unit of text against a lexicon.
///
/// Per valence token: a negator within the 3 preceding tokens multiplies the
/// valence by -0.74; each booster within that window adds its increment,
/// sign-aligned with the lexicon valence and decayed by 0.95 per step of
/// distance beyond the nearest position; an ALL-CAPS valence token adds
/// 0.733 toward the valence sign. Trailing `!` marks add 0.292 each (up to
/// 3) toward the sign of the raw sum.
pub fn score_text<F: Float>(text: &str, lex: &Lexicon<F>) -> SentimentScore<F> {
    let tokenized = tokenize(text);
    let tokens = &tokenized.tokens;
    if tokens.is_empty() {
        return SentimentScore::neutral();
    }

    let mut adjusted = vec![F::zero(); tokens.len()];
    for i in 0..tokens.len() {
        let Some(&valence) = lex.entries.get(&tokens[i].text) else {
            continue;
        };
        let mut value = valence;
        let window = i.saturating_sub(MODIFIER_WINDOW)..i;
        if tokens[window.clone()]
            .iter()
            .any(|t| lex.negators.contains(&t.text))
        {
            value = value * constant(NEGATION_SCALAR);
        }
        for j in window {
            if let Some(&increment) = lex.boosters.get(&tokens[j].text) {
                let distance = (i - j) as i32;
                let decay = constant::<F>(BOOSTER_DECAY).powi(distance - 1);
                value = value + direction(valence) * increment * decay;
            }
        }
        if tokens[i].all_caps {
            value = value + direction(valence) * constant(CAPS_INCREMENT);
        }
        adjusted[i] = value;
    }

    let mut raw = adjusted.iter().fold(F::zero(), |acc, &v| acc + v);
    raw = raw
        + direction(raw)
            * constant::<F>(EXCLAMATION_INCREMENT)
            * F::from(tokenized.exclamations).unwrap();

    let n = F::from(tokens.len()).unwrap();
    let pos = adjusted.iter().filter(|&&v| v > F::zero()).count();
    let neg = adjusted.iter().filter(|&&v| v < F::zero()).count();
    let neu = tokens.len() - pos - neg;

    SentimentScore {
        raw,
        compound: raw / (raw * raw + constant(NORMALIZATION_ALPHA)).sqrt(),
        pos_share: F::from(pos).unwrap() / n,
        neg_share: F::from(neg).unwrap() / n,
        neu_share: F::from(neu).unwrap() / n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoarseLabel {
    Negative,
    Neutral,
    Positive,
    Error,
}

impl std::fmt::Display for CoarseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoarseLabel::Negative => write!(f, "Negative"),
            CoarseLabel::Neutral => write!(f, "Neutral"),
            CoarseLabel::Positive => write!(f, "Positive"),
            CoarseLabel::Error => write!(f, "Error"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FineLabel {
    VeryNegative,
    SomewhatNegative,
    Neutral,
    SomewhatPositive,
    VeryPositive,
}

/// Three-way label with band boundaries inclusive toward the poles.
pub fn classify_with_band<F: Float>(score: &SentimentScore<F>, neutral_band: F) -> CoarseLabel {
    if score.compound >= neutral_band {
        CoarseLabel::Positive
    } else if score.compound <= -neutral_band {
        CoarseLabel::Negative
    } else {
        CoarseLabel::Neutral
    }
}

pub fn classify<F: Float>(score: &SentimentScore<F>) -> CoarseLabel {
    classify_with_band(score, constant(DEFAULT_NEUTRAL_BAND))
}

/// Five-way label; `fine_cut` separates "somewhat" from "very".
pub fn classify_fine_with<F: Float>(
    score: &SentimentScore<F>,
    neutral_band: F,
    fine_cut: F,
) -> FineLabel {
    let c = score.compound;
    if c >= fine_cut {
        FineLabel::VeryPositive
    } else if c >= neutral_band {
        FineLabel::SomewhatPositive
    } else if c <= -fine_cut {
        FineLabel::VeryNegative
    } else if c <= -neutral_band {
        FineLabel::SomewhatNegative
    } else {
        FineLabel::Neutral
    }
}

pub fn classify_fine<F: Float>(score: &SentimentScore<F>) -> FineLabel {
    classify_fine_with(score, constant(DEFAULT_NEUTRAL_BAND), constant(DEFAULT_FINE_CUT))
}
