//! `intersent` — batch sentiment and topic analysis over a directory of
//! speaker-tagged interview transcripts.
//!
//! Exit codes: 0 success, 1 input error, 2 empty or degenerate corpus.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use intersent::config::RunConfig;
use intersent::pipeline::{
    analyze_document, filter_subjective, summarize_cohorts, AnalyzeOptions, InterviewReport,
    LabeledAnswer,
};
use intersent::report;
use intersent::topics::{build_corpus, fit_lda_observed, perplexity, topic_sentiment, TopicError};
use intersent::transcript::{load_metadata, parse_transcript, ParticipantRecord, Transcript};
use intersent::Lexicon;

#[derive(Parser)]
#[command(name = "intersent", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze transcripts: counts CSV, roster CSV, cohort CSV, JSON report.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Override the short-answer word threshold.
        #[arg(long)]
        min_words: Option<usize>,
        /// Override the lexicon path.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Infer topics over subjective answers and stratify sentiment by topic.
    Topics {
        #[arg(long)]
        config: PathBuf,
        /// Override the number of topics.
        #[arg(long)]
        k: Option<usize>,
        /// Override the sampler seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the sweep count.
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Parse all configured inputs and report diagnostics without writing.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Failure carrying the process exit code.
enum CliError {
    Input(String),
    EmptyCorpus(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> CliError {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze {
            config,
            min_words,
            lexicon,
            out,
        } => load_config(&config).and_then(|mut cfg| {
            // flags win over config
            if let Some(m) = min_words {
                cfg.min_words = m;
            }
            if let Some(p) = lexicon {
                cfg.lexicon_path = p;
            }
            if let Some(p) = out {
                cfg.output_dir = p;
            }
            cfg.validate().map_err(CliError::input)?;
            cmd_analyze(&cfg)
        }),
        Command::Topics {
            config,
            k,
            seed,
            iterations,
        } => load_config(&config).and_then(|mut cfg| {
            let alpha_was_default = (cfg.lda.alpha - 50.0 / cfg.lda.k as f64).abs() < 1e-12;
            if let Some(k) = k {
                cfg.lda.k = k;
                if alpha_was_default {
                    cfg.lda.alpha = 50.0 / k as f64;
                }
            }
            if let Some(s) = seed {
                cfg.lda.seed = s;
            }
            if let Some(i) = iterations {
                cfg.lda.iterations = i;
            }
            cfg.validate().map_err(CliError::input)?;
            cmd_topics(&cfg)
        }),
        Command::Validate { config } => load_config(&config).and_then(|cfg| cmd_validate(&cfg)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::EmptyCorpus(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    RunConfig::from_file(path).map_err(CliError::input)
}

fn load_lexicon(path: &Path) -> Result<Lexicon, CliError> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::Input(format!("cannot open lexicon {}: {e}", path.display())))?;
    Lexicon::load(file)
        .map_err(|e| CliError::Input(format!("lexicon {}: {e}", path.display())))
}

fn load_roster(path: &Path) -> Result<Vec<ParticipantRecord>, CliError> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::Input(format!("cannot open metadata {}: {e}", path.display())))?;
    load_metadata(file).map_err(|e| CliError::Input(format!("metadata {}: {e}", path.display())))
}

fn load_stopwords(path: Option<&Path>) -> Result<HashSet<String>, CliError> {
    let Some(path) = path else {
        return Ok(HashSet::new());
    };
    let file = fs::File::open(path)
        .map_err(|e| CliError::Input(format!("cannot open stopwords {}: {e}", path.display())))?;
    let mut words = HashSet::new();
    for line in BufReader::new(file).lines() {
        let line = line
            .map_err(|e| CliError::Input(format!("stopwords {}: {e}", path.display())))?;
        let token = line.trim();
        if !token.is_empty() && !token.starts_with('#') {
            words.insert(token.to_lowercase());
        }
    }
    Ok(words)
}

/// Transcript files: `*.txt` under `transcript_dir`, id = file stem,
/// loaded in id order.
fn load_transcripts(
    dir: &Path,
    roster: &[ParticipantRecord],
) -> Result<Vec<Transcript>, CliError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::Input(format!("cannot read transcript dir {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map_or(false, |ext| ext == "txt"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::EmptyCorpus(format!(
            "no transcripts (*.txt) found in {}",
            dir.display()
        )));
    }

    let mut transcripts = Vec::new();
    for path in paths {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| CliError::Input(format!("bad transcript file name {}", path.display())))?
            .to_string();
        let file = fs::File::open(&path)
            .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))?;
        let mut transcript = parse_transcript(file, &id)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        transcript.participant = roster.iter().find(|r| r.id == id).cloned();
        transcripts.push(transcript);
    }
    Ok(transcripts)
}

fn run_analysis(cfg: &RunConfig) -> Result<(Vec<InterviewReport>, Vec<ParticipantRecord>), CliError> {
    let roster = load_roster(&cfg.metadata_path)?;
    let lexicon = load_lexicon(&cfg.lexicon_path)?;
    let transcripts = load_transcripts(&cfg.transcript_dir, &roster)?;
    let opts = AnalyzeOptions {
        min_words: cfg.min_words,
        thresholds: cfg.thresholds,
        mode: cfg.document_mode,
    };
    let mut reports: Vec<InterviewReport> = transcripts
        .iter()
        .map(|t| analyze_document(t, &lexicon, &opts))
        .collect();
    reports.sort_by(|a, b| a.transcript_id.cmp(&b.transcript_id));
    Ok((reports, roster))
}

/// Write named files into `output_dir` via a staging directory so a failed
/// run leaves no partial outputs behind.
fn write_outputs(output_dir: &Path, files: &[(&str, String)]) -> Result<(), CliError> {
    let parent = output_dir.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(parent) = parent {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", parent.display())))?;
    }
    let stage = tempfile::Builder::new()
        .prefix(".intersent-stage")
        .tempdir_in(parent.unwrap_or_else(|| Path::new(".")))
        .map_err(|e| CliError::Input(format!("cannot create staging dir: {e}")))?;
    for (name, body) in files {
        fs::write(stage.path().join(name), body)
            .map_err(|e| CliError::Input(format!("cannot write {name}: {e}")))?;
    }
    fs::create_dir_all(output_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", output_dir.display())))?;
    for (name, _) in files {
        fs::rename(stage.path().join(name), output_dir.join(name))
            .map_err(|e| CliError::Input(format!("cannot move {name} into place: {e}")))?;
    }
    Ok(())
}

fn manifest_json(cfg: &RunConfig, command: &str) -> String {
    let mut value = serde_json::to_value(cfg).expect("config is serializable");
    value["command"] = serde_json::Value::String(command.to_string());
    let mut out = serde_json::to_string_pretty(&value).expect("manifest is serializable");
    out.push('\n');
    out
}

fn cmd_analyze(cfg: &RunConfig) -> Result<(), CliError> {
    let (reports, roster) = run_analysis(cfg)?;
    let summaries = summarize_cohorts(&reports, &roster).map_err(CliError::input)?;
    let files = vec![
        ("counts.csv", report::counts_csv(&reports)),
        (
            "roster.csv",
            report::roster_csv(&reports, &roster).map_err(CliError::input)?,
        ),
        ("cohorts.csv", report::cohorts_csv(&summaries)),
        ("report.json", report::full_json(&reports)),
        ("run_manifest.json", manifest_json(cfg, "analyze")),
    ];
    write_outputs(&cfg.output_dir, &files)?;
    println!(
        "analyzed {} interviews -> {}",
        reports.len(),
        cfg.output_dir.display()
    );
    Ok(())
}

fn cmd_topics(cfg: &RunConfig) -> Result<(), CliError> {
    let (reports, _) = run_analysis(cfg)?;
    let stopwords = load_stopwords(cfg.stopword_path.as_deref())?;
    let subjective: Vec<LabeledAnswer> = filter_subjective(
        reports
            .iter()
            .flat_map(|r| r.answers.iter().cloned())
            .collect(),
    );
    let corpus = build_corpus(&subjective, &stopwords).map_err(|e| match e {
        TopicError::EmptyCorpus => {
            CliError::EmptyCorpus("no subjective answers to model topics over".into())
        }
        other => CliError::input(other),
    })?;

    let mut trace: Vec<(usize, f64)> = Vec::new();
    let emit_perplexity = cfg.emit_perplexity;
    let model = fit_lda_observed(
        &corpus,
        cfg.lda.k,
        cfg.lda.alpha,
        cfg.lda.beta,
        cfg.lda.iterations,
        cfg.lda.seed,
        |sweep, m| {
            if emit_perplexity {
                trace.push((sweep, perplexity(m, &corpus)));
            }
        },
    )
    .map_err(CliError::input)?;
    let stratified = topic_sentiment(&model, &corpus, &subjective).map_err(CliError::input)?;

    let mut files = vec![
        (
            "topic_words.csv",
            report::topic_words_csv(&model, &corpus, cfg.topic_top_words),
        ),
        (
            "topic_sentiment.csv",
            report::topic_sentiment_csv(&stratified),
        ),
        ("run_manifest.json", manifest_json(cfg, "topics")),
    ];
    if emit_perplexity {
        files.push(("perplexity.csv", report::perplexity_csv(&trace)));
    }
    write_outputs(&cfg.output_dir, &files)?;
    println!(
        "modeled {} topics over {} subjective answers -> {}",
        cfg.lda.k,
        corpus.docs.len(),
        cfg.output_dir.display()
    );
    Ok(())
}

fn cmd_validate(cfg: &RunConfig) -> Result<(), CliError> {
    let mut errors = 0usize;

    let roster = match load_roster(&cfg.metadata_path) {
        Ok(roster) => {
            println!("ok: {} ({} participants)", cfg.metadata_path.display(), roster.len());
            roster
        }
        Err(CliError::Input(msg)) | Err(CliError::EmptyCorpus(msg)) => {
            println!("error: {msg}");
            errors += 1;
            Vec::new()
        }
    };

    match load_lexicon(&cfg.lexicon_path) {
        Ok(lex) => println!(
            "ok: {} ({} valence entries, {} negators, {} boosters)",
            cfg.lexicon_path.display(),
            lex.entries.len(),
            lex.negators.len(),
            lex.boosters.len()
        ),
        Err(CliError::Input(msg)) | Err(CliError::EmptyCorpus(msg)) => {
            println!("error: {msg}");
            errors += 1;
        }
    }

    if let Some(path) = cfg.stopword_path.as_deref() {
        match load_stopwords(Some(path)) {
            Ok(words) => println!("ok: {} ({} stopwords)", path.display(), words.len()),
            Err(CliError::Input(msg)) | Err(CliError::EmptyCorpus(msg)) => {
                println!("error: {msg}");
                errors += 1;
            }
        }
    }

    let mut transcript_ids: Vec<String> = Vec::new();
    match fs::read_dir(&cfg.transcript_dir) {
        Err(e) => {
            println!("error: cannot read transcript dir {}: {e}", cfg.transcript_dir.display());
            errors += 1;
        }
        Ok(entries) => {
            let mut paths: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().map_or(false, |ext| ext == "txt"))
                .collect();
            paths.sort();
            for path in paths {
                let id = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or_default()
                    .to_string();
                match fs::File::open(&path).map_err(|e| e.to_string()).and_then(|f| {
                    parse_transcript(f, &id).map_err(|e| e.to_string())
                }) {
                    Ok(t) => {
                        println!("ok: {} ({} turns)", path.display(), t.turns.len());
                        transcript_ids.push(id);
                    }
                    Err(msg) => {
                        println!("error: {}: {msg}", path.display());
                        errors += 1;
                    }
                }
            }
        }
    }

    // a transcript without metadata would fail analyze; the reverse is benign
    for id in &transcript_ids {
        if !roster.iter().any(|r| &r.id == id) {
            println!("error: transcript {id:?} has no metadata record");
            errors += 1;
        }
    }
    for record in &roster {
        if !transcript_ids.contains(&record.id) {
            println!("warning: metadata id {:?} has no transcript", record.id);
        }
    }

    if errors > 0 {
        Err(CliError::Input(format!("{errors} invalid input(s)")))
    } else {
        println!("all inputs valid");
        Ok(())
    }
}
