//! Run configuration: a flat `key = value` file plus command-line
//! overrides. Relative paths resolve against the config file's directory
//! so runs are reproducible from any working directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::pipeline::{DocumentMode, Thresholds};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("config is missing required key {0:?}")]
    MissingKey(&'static str),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct LdaConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

/// Every behavioral parameter of a run. Serialized verbatim into the run
/// manifest so no default stays silent.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub transcript_dir: PathBuf,
    pub metadata_path: PathBuf,
    pub lexicon_path: PathBuf,
    pub stopword_path: Option<PathBuf>,
    pub min_words: usize,
    pub thresholds: Thresholds,
    pub lda: LdaConfig,
    pub output_dir: PathBuf,
    pub document_mode: DocumentMode,
    pub topic_top_words: usize,
    pub emit_perplexity: bool,
}

const KEYS: &[&str] = &[
    "transcript_dir",
    "metadata_path",
    "lexicon_path",
    "stopword_path",
    "min_words",
    "neutral_band",
    "fine_cut",
    "k",
    "alpha",
    "beta",
    "iterations",
    "seed",
    "output_dir",
    "document_mode",
    "topic_top_words",
    "emit_perplexity",
];

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Parse {
        line,
        message: format!("unparsable value {value:?} for key {key:?}"),
    })
}

impl RunConfig {
    /// Parse a config file. Grammar: one `key = value` pair per line,
    /// `#` comments and blank lines ignored, unknown keys rejected.
    pub fn from_file(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));

        let mut transcript_dir = None;
        let mut metadata_path = None;
        let mut lexicon_path = None;
        let mut stopword_path = None;
        let mut min_words = 3usize;
        let mut neutral_band = crate::sentiment::DEFAULT_NEUTRAL_BAND;
        let mut fine_cut = crate::sentiment::DEFAULT_FINE_CUT;
        let mut k = 5usize;
        let mut alpha: Option<f64> = None;
        let mut beta = 0.01f64;
        let mut iterations = 500usize;
        let mut seed = 42u64;
        let mut output_dir = base.join("out");
        let mut document_mode = DocumentMode::ConcatenatedAnswers;
        let mut topic_top_words = 10usize;
        let mut emit_perplexity = false;

        let mut seen: HashSet<String> = HashSet::new();
        for (i, raw_line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Parse {
                line: lineno,
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(ConfigError::Parse {
                    line: lineno,
                    message: format!("unknown key {key:?}"),
                });
            }
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::Parse {
                    line: lineno,
                    message: format!("duplicate key {key:?}"),
                });
            }
            match key {
                "transcript_dir" => transcript_dir = Some(base.join(value)),
                "metadata_path" => metadata_path = Some(base.join(value)),
                "lexicon_path" => lexicon_path = Some(base.join(value)),
                "stopword_path" => stopword_path = Some(base.join(value)),
                "min_words" => min_words = parse_value(lineno, key, value)?,
                "neutral_band" => neutral_band = parse_value(lineno, key, value)?,
                "fine_cut" => fine_cut = parse_value(lineno, key, value)?,
                "k" => k = parse_value(lineno, key, value)?,
                "alpha" => alpha = Some(parse_value(lineno, key, value)?),
                "beta" => beta = parse_value(lineno, key, value)?,
                "iterations" => iterations = parse_value(lineno, key, value)?,
                "seed" => seed = parse_value(lineno, key, value)?,
                "output_dir" => output_dir = base.join(value),
                "topic_top_words" => topic_top_words = parse_value(lineno, key, value)?,
                "emit_perplexity" => emit_perplexity = parse_value(lineno, key, value)?,
                "document_mode" => {
                    document_mode = match value {
                        "concatenated_answers" => DocumentMode::ConcatenatedAnswers,
                        "raw_transcript" => DocumentMode::RawTranscript,
                        other => {
                            return Err(ConfigError::Parse {
                                line: lineno,
                                message: format!("unknown document_mode {other:?}"),
                            })
                        }
                    }
                }
                _ => unreachable!("key list checked above"),
            }
        }

        let config = RunConfig {
            transcript_dir: transcript_dir.ok_or(ConfigError::MissingKey("transcript_dir"))?,
            metadata_path: metadata_path.ok_or(ConfigError::MissingKey("metadata_path"))?,
            lexicon_path: lexicon_path.ok_or(ConfigError::MissingKey("lexicon_path"))?,
            stopword_path,
            min_words,
            thresholds: Thresholds {
                neutral_band,
                fine_cut,
            },
            // alpha defaults to 50/K against the effective K
            lda: LdaConfig {
                k,
                alpha: alpha.unwrap_or(50.0 / k as f64),
                beta,
                iterations,
                seed,
            },
            output_dir,
            document_mode,
            topic_top_words,
            emit_perplexity,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.min_words < 1 {
            return Err(ConfigError::Invalid("min_words must be >= 1".into()));
        }
        if !(self.thresholds.neutral_band > 0.0) {
            return Err(ConfigError::Invalid("neutral_band must be > 0".into()));
        }
        if self.thresholds.fine_cut <= self.thresholds.neutral_band {
            return Err(ConfigError::Invalid(
                "fine_cut must exceed neutral_band".into(),
            ));
        }
        if self.lda.k < 2 {
            return Err(ConfigError::Invalid("k must be >= 2".into()));
        }
        if !(self.lda.alpha > 0.0) || !(self.lda.beta > 0.0) {
            return Err(ConfigError::Invalid("alpha and beta must be > 0".into()));
        }
        if self.lda.iterations < 1 {
            return Err(ConfigError::Invalid("iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("run.conf");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        path
    }

    const MINIMAL: &str = "transcript_dir = corpus\nmetadata_path = meta.csv\nlexicon_path = lex.tsv\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::from_file(&write_config(dir.path(), MINIMAL)).unwrap();
        assert_eq!(cfg.min_words, 3);
        assert_eq!(cfg.thresholds.neutral_band, 0.05);
        assert_eq!(cfg.thresholds.fine_cut, 0.6);
        assert_eq!(cfg.lda.k, 5);
        assert_eq!(cfg.lda.alpha, 10.0); // 50 / K
        assert_eq!(cfg.lda.beta, 0.01);
        assert_eq!(cfg.lda.iterations, 500);
        assert_eq!(cfg.lda.seed, 42);
        assert!(cfg.stopword_path.is_none());
        assert!(!cfg.emit_perplexity);
    }

    #[test]
    fn relative_paths_resolve_against_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::from_file(&write_config(dir.path(), MINIMAL)).unwrap();
        assert_eq!(cfg.transcript_dir, dir.path().join("corpus"));
        assert_eq!(cfg.output_dir, dir.path().join("out"));
    }

    #[test]
    fn default_alpha_tracks_k() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("{MINIMAL}k = 10\n");
        let cfg = RunConfig::from_file(&write_config(dir.path(), &body)).unwrap();
        assert_eq!(cfg.lda.alpha, 5.0);
    }

    #[test]
    fn rejections() {
        let dir = tempfile::tempdir().unwrap();
        for (body, needle) in [
            ("transcript_dir = c\n", "metadata_path"),
            (&format!("{MINIMAL}bogus = 1\n") as &str, "unknown key"),
            (&format!("{MINIMAL}min_words = 0\n"), "min_words"),
            (&format!("{MINIMAL}fine_cut = 0.01\n"), "fine_cut"),
            (&format!("{MINIMAL}k = nope\n"), "unparsable"),
            (&format!("{MINIMAL}k = 3\nk = 4\n"), "duplicate"),
            ("transcript_dir\n", "key = value"),
        ] {
            let err = RunConfig::from_file(&write_config(dir.path(), body)).unwrap_err();
            let msg = err.to_string();
            assert!(msg.contains(needle), "{msg:?} should mention {needle:?}");
        }
    }

    #[test]
    fn comments_and_modes() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("# a comment\n{MINIMAL}document_mode = raw_transcript\n");
        let cfg = RunConfig::from_file(&write_config(dir.path(), &body)).unwrap();
        assert_eq!(cfg.document_mode, DocumentMode::RawTranscript);
    }
}
