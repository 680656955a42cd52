//! Subcommands. Each writes its report to `out` and returns an error for the
//! caller to print.

use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use forestjudge::store::{
    export_script, export_training, find_suspects, merge, pos_propagate, replay, update_priors, SuspectConfig,
    DEFAULT_MAX_RECORDS,
};
use forestjudge::{
    parse_all, AutoConfig, ClassMap, Corpus, Grammar, PriorTable, SentenceRecord, StoreConfig, StoreError,
    DEFAULT_MAX_ANALYSES,
};

use crate::archive_vanished;
use crate::server::{self, AppState, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "forestjudge", version, about = "Judge discriminants to pick the right parse")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct DbArgs {
    /// Corpus directory.
    #[arg(long, env = "FORESTJUDGE_DB")]
    pub db: PathBuf,
    /// Maximum sentences per corpus file.
    #[arg(long, default_value_t = DEFAULT_MAX_RECORDS)]
    pub max_records: usize,
}

impl DbArgs {
    fn open(&self) -> Result<Corpus> {
        let config = StoreConfig { max_records: self.max_records, ..StoreConfig::default() };
        Corpus::open(&self.db, config).with_context(|| format!("opening corpus {}", self.db.display()))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a text file, one sentence per line, into corpus files.
    Ingest {
        /// Grammar file; the bundled grammar when omitted.
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_RECORDS)]
        max_records: usize,
        /// Prefix for new corpus file names.
        #[arg(long, default_value = "corpus")]
        prefix: String,
        /// Skip sentences that do not parse instead of failing.
        #[arg(long)]
        skip_failures: bool,
    },
    /// Run the annotation service.
    Serve {
        #[command(flatten)]
        db: DbArgs,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long)]
        classes: Option<PathBuf>,
        /// Prior table enabling automatic resolution.
        #[arg(long)]
        priors: Option<PathBuf>,
        #[arg(long, default_value_t = AutoConfig::default().min_support)]
        min_support: u64,
        #[arg(long, default_value_t = AutoConfig::default().min_agreement)]
        min_agreement: f64,
    },
    /// Apply a judgment script.
    Replay {
        #[command(flatten)]
        db: DbArgs,
        #[arg(long)]
        script: PathBuf,
    },
    /// Report judgments that go against the corpus majority.
    Check {
        #[command(flatten)]
        db: DbArgs,
        #[arg(long)]
        classes: Option<PathBuf>,
        #[arg(long, default_value_t = SuspectConfig::default().min_support)]
        min_support: u64,
        #[arg(long, default_value_t = SuspectConfig::default().min_agreement)]
        min_agreement: f64,
    },
    /// Re-parse every sentence with a new grammar and carry judgments over.
    Merge {
        #[command(flatten)]
        db: DbArgs,
        #[arg(long)]
        grammar: PathBuf,
    },
    /// Write decided discriminants of ok sentences as training lines.
    Export {
        #[command(flatten)]
        db: DbArgs,
        #[arg(long)]
        classes: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// List not-ok sentences of one failure type.
    Failures {
        #[command(flatten)]
        db: DbArgs,
        #[arg(long = "type")]
        failure_type: String,
    },
    /// Sentence counts by status and judgments per sentence.
    Stats {
        #[command(flatten)]
        db: DbArgs,
        #[arg(long)]
        json: bool,
    },
    /// Write every log and status as a replayable script.
    Script {
        #[command(flatten)]
        db: DbArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Copy the judgments of an ok sentence to sentences with the same tags.
    Propagate {
        #[command(flatten)]
        db: DbArgs,
        #[arg(long)]
        id: String,
    },
    /// Count decided discriminants of ok sentences into a prior table.
    Priors {
        #[command(flatten)]
        db: DbArgs,
        #[arg(long)]
        classes: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn grammar(path: Option<&Path>) -> Result<Grammar> {
    match path {
        Some(p) => Grammar::load(p).with_context(|| format!("loading grammar {}", p.display())),
        None => Ok(Grammar::bundled()),
    }
}

fn classes(path: Option<&Path>) -> Result<ClassMap> {
    match path {
        Some(p) => ClassMap::load(p).with_context(|| format!("loading classes {}", p.display())),
        None => Ok(ClassMap::bundled()),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Ingest { grammar: g, text, out: dir, max_records, prefix, skip_failures } => {
            let config = StoreConfig { max_records, ..StoreConfig::default() };
            let mut corpus = Corpus::open(&dir, config)?;
            ingest(&mut corpus, &grammar(g.as_deref())?, &read(&text)?, &prefix, skip_failures, out)?;
            corpus.save()?;
            writeln!(out, "{} sentences in {} file(s) under {}", corpus.len(), corpus.files().len(), dir.display())?;
        }
        Command::Serve { db, port, host, grammar: g, classes: c, priors, min_support, min_agreement } => {
            let priors = priors.map(|p| PriorTable::from_tsv(&read(&p)?).context("reading priors")).transpose()?;
            let config = ServiceConfig {
                grammar: grammar(g.as_deref())?,
                classes: classes(c.as_deref())?,
                priors,
                auto: AutoConfig::new(min_support, min_agreement)?,
                suspects: SuspectConfig::default(),
            };
            let state = Arc::new(AppState::new(db.open()?, config));
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(server::serve(state, SocketAddr::new(host, port)))?;
        }
        Command::Replay { db, script } => {
            let mut corpus = db.open()?;
            let report = replay(&mut corpus, &read(&script)?)?;
            corpus.save()?;
            writeln!(out, "{} actions on {} sentence(s)", report.actions, report.touched.len())?;
            if !report.auto_ok.is_empty() {
                writeln!(out, "marked ok: {}", report.auto_ok.join(" "))?;
            }
        }
        Command::Check { db, classes: c, min_support, min_agreement } => {
            let corpus = db.open()?;
            let classes = classes(c.as_deref())?;
            let priors = update_priors(corpus.records(), &classes)?;
            let config = SuspectConfig { min_support, min_agreement };
            let suspects = find_suspects(corpus.records(), &priors, &classes, &config)?;
            if suspects.is_empty() {
                writeln!(out, "no suspects")?;
            }
            for s in suspects {
                let display = &corpus.record(&s.id)?.incidence().property(&s.key).map_err(StoreError::from)?.display;
                writeln!(
                    out,
                    "{}\t{display}\t{}\tagainst {:.0}% of {}",
                    s.id,
                    s.value,
                    s.agreement * 100.0,
                    s.support
                )?;
            }
        }
        Command::Merge { db, grammar: g } => {
            let mut corpus = db.open()?;
            merge_all(&mut corpus, &grammar(Some(&g))?, out)?;
        }
        Command::Export { db, classes: c, out: path } => {
            let corpus = db.open()?;
            let text = export_training(corpus.records(), &classes(c.as_deref())?)?;
            write(&path, &text)?;
            writeln!(out, "{} training lines", text.lines().count())?;
        }
        Command::Failures { db, failure_type } => {
            let corpus = db.open()?;
            for r in corpus.list_failures(&failure_type)? {
                writeln!(out, "{}\t{}\t{}", r.id(), r.comment().unwrap_or(""), r.sentence().text())?;
            }
        }
        Command::Stats { db, json } => {
            let stats = db.open()?.stats();
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&stats)?)?;
            } else {
                writeln!(out, "sentences\t{}", stats.sentences)?;
                writeln!(out, "undecided\t{}", stats.undecided)?;
                writeln!(out, "ok\t{}", stats.ok)?;
                writeln!(out, "not-ok\t{}", stats.not_ok)?;
                writeln!(out, "judgments per sentence")?;
                for (judgments, sentences) in &stats.judgments_histogram {
                    writeln!(out, "{judgments}\t{sentences}")?;
                }
            }
        }
        Command::Script { db, out: path } => {
            write(&path, &export_script(&db.open()?))?;
        }
        Command::Propagate { db, id } => {
            let mut corpus = db.open()?;
            let report = pos_propagate(&mut corpus, &id)?;
            corpus.save()?;
            for u in &report.updated {
                writeln!(out, "{}\t{} judgment(s)\t{} candidate(s)", u.id, u.keys.len(), u.candidates)?;
            }
            for c in &report.conflicts {
                writeln!(out, "{c}\tconflict, unchanged")?;
            }
        }
        Command::Priors { db, classes: c, out: path } => {
            let corpus = db.open()?;
            let priors = update_priors(corpus.records(), &classes(c.as_deref())?)?;
            write(&path, &priors.to_tsv())?;
            writeln!(out, "{} prior entries", priors.len())?;
        }
    }
    Ok(())
}

/// Parses each non-blank line not starting with `#` and adds it to the corpus
/// under the next free `sNNNN` id.
pub fn ingest(
    corpus: &mut Corpus,
    grammar: &Grammar,
    text: &str,
    prefix: &str,
    skip_failures: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let mut next = corpus.len() + 1;
    let mut records = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let id = loop {
            let id = format!("s{next:04}");
            next += 1;
            if corpus.locate(&id).is_none() {
                break id;
            }
        };
        let parsed =
            grammar.tokenize(&id, line).and_then(|s| parse_all(&s, grammar, DEFAULT_MAX_ANALYSES).map(|a| (s, a)));
        let record = match parsed {
            Ok((_, a)) if a.is_empty() => Err(anyhow::anyhow!("no analyses")),
            Ok((s, a)) => SentenceRecord::new(s, a).map_err(Into::into),
            Err(e) => Err(e.into()),
        };
        match record {
            Ok(r) => {
                let n = r.incidence().analysis_count();
                writeln!(out, "{id}\t{n} {}\t{line}", if n == 1 { "analysis" } else { "analyses" })?;
                records.push(r);
            }
            Err(e) if skip_failures => {
                next -= 1;
                writeln!(out, "skipped line {}: {e}", n + 1)?;
            }
            Err(e) => bail!("line {}: {e}", n + 1),
        }
    }
    corpus.add_records(records, prefix)?;
    Ok(())
}

/// Re-parses every sentence and merges its judgments. Sentences the grammar
/// no longer covers keep their old analyses.
pub fn merge_all(corpus: &mut Corpus, grammar: &Grammar, out: &mut dyn Write) -> Result<()> {
    let ids: Vec<String> = corpus.records().map(|r| r.id().to_string()).collect();
    for id in ids {
        let old = corpus.record(&id)?;
        let parsed = grammar
            .tokenize(&id, &old.sentence().text())
            .and_then(|s| parse_all(&s, grammar, DEFAULT_MAX_ANALYSES).map(|a| (s, a)));
        let (sentence, analyses) = match parsed {
            Ok((s, a)) if !a.is_empty() => (s, a),
            Ok(_) => {
                writeln!(out, "{id}\tkept: no analyses")?;
                continue;
            }
            Err(e) => {
                writeln!(out, "{id}\tkept: {e}")?;
                continue;
            }
        };
        let (record, report) = match merge(old, &sentence, analyses) {
            Ok(m) => m,
            Err(StoreError::TokenMismatch(_)) => {
                writeln!(out, "{id}\tkept: tokens differ")?;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        archive_vanished(corpus.dir(), &report)?;
        writeln!(
            out,
            "{id}\t{} transferred\t{} vanished\tcandidates {} -> {}\t{} -> {}",
            report.transferred.len(),
            report.vanished.len(),
            report.old_candidates,
            report.new_candidates,
            report.old_status,
            report.new_status
        )?;
        *corpus.record_mut(&id)? = record;
    }
    corpus.save()?;
    Ok(())
}
