//! Shared test support: a brute-force scoring oracle kept independent of
//! the library's scoring path, plus fixture helpers.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

/// Plain-data lexicon for the oracle; linear scans only, no maps shared
/// with the implementation.
#[derive(Clone, Default)]
pub struct OracleLexicon {
    pub entries: Vec<(String, f64)>,
    pub negators: Vec<String>,
    pub boosters: Vec<(String, f64)>,
}

struct OracleToken {
    text: String,
    caps: bool,
}

fn oracle_tokens(text: &str) -> (Vec<OracleToken>, u32) {
    let mut bangs = 0u32;
    for c in text.trim_end().chars().rev() {
        if c == '!' && bangs < 3 {
            bangs += 1;
        } else {
            break;
        }
    }
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        let mut chars: Vec<char> = word.chars().collect();
        while let Some(&last) = chars.last() {
            if last.is_alphanumeric() {
                break;
            }
            chars.pop();
        }
        if chars.is_empty() {
            continue;
        }
        let has_alpha = chars.iter().any(|c| c.is_alphabetic());
        let has_lower = chars.iter().any(|c| c.is_lowercase());
        tokens.push(OracleToken {
            text: chars.iter().collect::<String>().to_lowercase(),
            caps: has_alpha && !has_lower,
        });
    }
    (tokens, bangs)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Walk the tokens and apply the scoring rules literally, one at a time.
pub fn oracle_raw(text: &str, lex: &OracleLexicon) -> f64 {
    let (tokens, bangs) = oracle_tokens(text);
    let mut raw = 0.0;
    for i in 0..tokens.len() {
        let mut valence = None;
        for (entry, v) in &lex.entries {
            if *entry == tokens[i].text {
                valence = Some(*v);
            }
        }
        let Some(v) = valence else { continue };
        let mut adjusted = v;

        let mut negated = false;
        for back in 1..=3 {
            if back > i {
                break;
            }
            if lex.negators.iter().any(|n| *n == tokens[i - back].text) {
                negated = true;
            }
        }
        if negated {
            adjusted *= -0.74;
        }

        for back in 1..=3usize {
            if back > i {
                break;
            }
            for (booster, inc) in &lex.boosters {
                if *booster == tokens[i - back].text {
                    adjusted += sign(v) * inc * 0.95f64.powi(back as i32 - 1);
                }
            }
        }

        if tokens[i].caps {
            adjusted += sign(v) * 0.733;
        }
        raw += adjusted;
    }
    raw + sign(raw) * 0.292 * f64::from(bangs)
}

pub fn oracle_compound(text: &str, lex: &OracleLexicon) -> f64 {
    let raw = oracle_raw(text, lex);
    raw / (raw * raw + 15.0).sqrt()
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Write a config file into `dir` pointing at the standard fixtures.
/// `overrides` are `key = value` lines that replace the baseline entries.
pub fn write_fixture_config(dir: &Path, overrides: &str) -> PathBuf {
    let fixtures = fixture_dir();
    let mut pairs: Vec<(String, String)> = vec![
        ("transcript_dir".into(), fixtures.join("corpus").display().to_string()),
        ("metadata_path".into(), fixtures.join("metadata.csv").display().to_string()),
        ("lexicon_path".into(), fixtures.join("lexicon.tsv").display().to_string()),
        ("stopword_path".into(), fixtures.join("stopwords.txt").display().to_string()),
        ("min_words".into(), "3".into()),
        ("k".into(), "3".into()),
        ("iterations".into(), "200".into()),
        ("seed".into(), "42".into()),
        ("output_dir".into(), dir.join("out").display().to_string()),
    ];
    for line in overrides.lines() {
        let (key, value) = line.split_once('=').expect("override is `key = value`");
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        match pairs.iter_mut().find(|(k, _)| *k == key) {
            Some(pair) => pair.1 = value,
            None => pairs.push((key, value)),
        }
    }
    let body: String = pairs
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect();
    let path = dir.join("run.conf");
    std::fs::write(&path, body).unwrap();
    path
}

/// Convert the oracle lexicon into the implementation's type.
pub fn to_impl_lexicon(lex: &OracleLexicon) -> intersent::Lexicon {
    intersent::sentiment::Lexicon::from_parts(
        lex.entries.iter().cloned().collect(),
        lex.negators.iter().cloned().collect(),
        lex.boosters.iter().cloned().collect(),
    )
    .unwrap()
}

/// The 50-entry toy lexicon used for randomized oracle-equivalence runs.
pub fn toy_lexicon() -> OracleLexicon {
    let mut entries = Vec::new();
    for i in 0..25 {
        entries.push((format!("pos{i}"), 0.3 + 0.14 * i as f64));
        entries.push((format!("neg{i}"), -0.25 - 0.13 * i as f64));
    }
    OracleLexicon {
        entries,
        negators: ["not", "never", "no", "hardly", "without"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        boosters: vec![
            ("very".into(), 0.293),
            ("really".into(), 0.267),
            ("extremely".into(), 0.31),
            ("somewhat".into(), -0.293),
            ("barely".into(), -0.2),
        ],
    }
}
