//! `dard` command-line entry point.

mod chat;
mod config;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;

use dard::agents::ExampleBank;
use dard::corpus::{export_dst, write_jsonl, Corpus, ExportMode, Split};
use dard::domain::Domain;
use dard::kb::Database;
use dard::metrics::{venue_suggestion_analysis, ErrorCategory, Evaluator, PredictionSet};
use dard::orchestrator::{Pipeline, RunMode};

use config::{check_threshold, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "dard", version, about = "Multi-domain dialogue pipeline and MultiWOZ evaluation")]
struct Cli {
    /// Seed for agent example sampling; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Minimum normalized Levenshtein similarity for value matches.
    #[arg(long, global = true)]
    fuzzy_threshold: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a predictions file against a corpus split.
    Eval {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "test")]
        split: Split,
        /// Write the report as JSON here, and the table next to it.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the configured agents over a corpus split.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "test")]
        split: Split,
        #[arg(long, default_value = "end-to-end")]
        mode: RunMode,
        /// Predictions file; overrides `output.predictions`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        concurrency: Option<usize>,
    },
    /// Write state-tracking training examples as JSON lines.
    ExportDst {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "train")]
        split: Split,
        #[arg(long, default_value = "single")]
        mode: ExportMode,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Venue-suggestion rates and, given predictions, the state error histogram.
    Analyze {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "train")]
        split: Split,
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Write the JSON result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the bucket rates as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Interactive conversation on stdin/stdout.
    Chat {
        #[arg(long)]
        config: PathBuf,
        /// Transcript file written on exit; overrides `output.transcript`.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Database inspection.
    Db {
        #[command(subcommand)]
        command: DbCommand,
    },
}

#[derive(Debug, Subcommand)]
enum DbCommand {
    /// Print matching venues as JSON lines.
    Query {
        domain: Domain,
        /// Constraints as key=value.
        #[arg(value_parser = parse_constraint)]
        constraints: Vec<(String, String)>,
        /// Database directory; defaults to `<corpus>/db` or the bundled files.
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        limit: Option<usize>,
    },
}

fn parse_constraint(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Failure classes, mapped to exit codes 1, 2 and 3.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    Partial(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Partial(_) => 3,
        }
    }
}

pub type CmdResult = Result<(), Failure>;

trait Classify<T> {
    fn usage(self) -> Result<T, Failure>;
    fn data(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }
    fn data(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Data(e.into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(e) | Failure::Data(e) => eprintln!("error: {e:#}"),
                Failure::Partial(msg) => eprintln!("warning: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let threshold = cli.fuzzy_threshold;
    if let Some(t) = threshold {
        check_threshold(t).usage()?;
    }
    let t = threshold.unwrap_or(0.9);
    match cli.command {
        Command::Eval {
            predictions,
            corpus,
            split,
            report,
        } => cmd_eval(&predictions, &corpus, split, report.as_deref(), t),
        Command::Run {
            config,
            split,
            mode,
            out,
            concurrency,
        } => {
            let mut cfg = RunConfig::load(&config).usage()?.finish(cli.seed, threshold).usage()?;
            if let Some(c) = concurrency {
                cfg.concurrency = c.max(1);
            }
            cmd_run(&cfg, split, mode, out)
        }
        Command::ExportDst {
            corpus,
            split,
            mode,
            out_dir,
        } => cmd_export_dst(&corpus, split, mode, &out_dir),
        Command::Analyze {
            corpus,
            split,
            predictions,
            out,
            csv,
        } => cmd_analyze(&corpus, split, predictions.as_deref(), out.as_deref(), csv.as_deref(), t),
        Command::Chat { config, transcript } => {
            let cfg = RunConfig::load(&config).usage()?.finish(cli.seed, threshold).usage()?;
            let path = transcript
                .or_else(|| cfg.output.transcript.clone())
                .unwrap_or_else(|| PathBuf::from("transcript.json"));
            let stdin = std::io::stdin();
            let stdout = std::io::stdout();
            chat::cmd_chat(&cfg, stdin.lock(), stdout.lock(), &path)
        }
        Command::Db {
            command:
                DbCommand::Query {
                    domain,
                    constraints,
                    db,
                    corpus,
                    limit,
                },
        } => cmd_db_query(domain, constraints, db.as_deref(), corpus.as_deref(), limit, t),
    }
}

fn load_corpus(root: &Path) -> Result<Corpus, Failure> {
    let c = Corpus::load(root)
        .with_context(|| format!("cannot load corpus at {}", root.display()))
        .data()?;
    Ok(c.filter_active())
}

fn load_db(root: &Path, threshold: f64) -> Result<Database, Failure> {
    Ok(Database::for_corpus(root).data()?.with_fuzzy_threshold(threshold))
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))
            .data()?;
    }
    fs::write(path, contents)
        .with_context(|| format!("cannot write {}", path.display()))
        .data()
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_eval(predictions: &Path, corpus: &Path, split: Split, report: Option<&Path>, t: f64) -> CmdResult {
    let preds = PredictionSet::load(predictions)
        .with_context(|| format!("bad predictions file {}", predictions.display()))
        .data()?;
    let c = load_corpus(corpus)?;
    let db = load_db(corpus, t)?;
    let r = Evaluator::new(&db, t).evaluate(c.split(split), &preds);
    let table = r.render_table();
    print!("{table}");
    if let Some(path) = report {
        write_file(path, &to_json(&r))?;
        write_file(&path.with_extension("txt"), &table)?;
    }
    Ok(())
}

fn cmd_run(cfg: &RunConfig, split: Split, mode: RunMode, out: Option<PathBuf>) -> CmdResult {
    let out = out
        .or_else(|| cfg.output.predictions.clone())
        .ok_or_else(|| Failure::Usage(anyhow!("no output path: pass --out or set output.predictions")))?;
    let registry = cfg.registry();
    let root = cfg
        .corpus_root
        .as_deref()
        .ok_or_else(|| Failure::Usage(anyhow!("`corpus_root` is required for run")))?;
    // Credential and wiring problems surface before the corpus is read.
    let key = std::env::var(dard::agents::API_KEY_ENV).ok().filter(|k| !k.is_empty());
    if registry.uses_llm() && key.is_none() {
        return Err(Failure::Usage(anyhow!(
            "remote agents are configured but {} is not set",
            dard::agents::API_KEY_ENV
        )));
    }
    let c = load_corpus(root)?;
    let db = Arc::new(load_db(root, cfg.fuzzy_threshold)?);
    let bank = if registry.uses_llm() {
        ExampleBank::from_corpus(&c)
    } else {
        ExampleBank::default()
    };
    let pipeline = Pipeline::build_with_key(&registry, db.clone(), Arc::new(bank), key).usage()?;
    let preds = pipeline.run_corpus(c.split(split), mode, cfg.concurrency);
    write_file(&out, &preds.to_json())?;
    if let Some(report) = &cfg.output.report {
        let r = Evaluator::new(&db, cfg.fuzzy_threshold).evaluate(c.split(split), &preds);
        write_file(report, &to_json(&r))?;
    }
    let failed = preds.failed_turns();
    if failed > 0 {
        return Err(Failure::Partial(format!(
            "{failed} turn(s) failed; predictions written to {}",
            out.display()
        )));
    }
    Ok(())
}

fn cmd_export_dst(corpus: &Path, split: Split, mode: ExportMode, out_dir: &Path) -> CmdResult {
    let c = load_corpus(corpus)?;
    let examples = export_dst(&c, split, mode);
    let mut groups: BTreeMap<String, Vec<_>> = BTreeMap::new();
    for e in examples {
        let file = match e.domain_filter {
            Some(d) => format!("dst_{split}_{d}.jsonl"),
            None => format!("dst_{split}.jsonl"),
        };
        groups.entry(file).or_default().push(e);
    }
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))
        .data()?;
    let mut counts = BTreeMap::new();
    for (file, records) in &groups {
        let path = out_dir.join(file);
        let f = fs::File::create(&path)
            .with_context(|| format!("cannot write {}", path.display()))
            .data()?;
        write_jsonl(std::io::BufWriter::new(f), records).data()?;
        counts.insert(file.clone(), records.len());
    }
    print!("{}", to_json(&counts));
    Ok(())
}

#[derive(Serialize)]
struct Analysis {
    split: Split,
    venue_suggestion: dard::metrics::SuggestionRates,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_histogram: Option<BTreeMap<ErrorCategory, f64>>,
}

fn cmd_analyze(
    corpus: &Path,
    split: Split,
    predictions: Option<&Path>,
    out: Option<&Path>,
    csv: Option<&Path>,
    t: f64,
) -> CmdResult {
    let preds = predictions
        .map(|p| PredictionSet::load(p).with_context(|| format!("bad predictions file {}", p.display())))
        .transpose()
        .data()?;
    let c = load_corpus(corpus)?;
    let db = load_db(corpus, t)?;
    let dialogues = c.split(split);
    let rates = venue_suggestion_analysis(dialogues, &db);
    let error_histogram = preds.map(|p| Evaluator::new(&db, t).evaluate(dialogues, &p).error_histogram);
    if let Some(path) = csv {
        let mut s = String::from("bucket,turns,named,rate\n");
        for (label, b) in [
            (">=10", &rates.at_least_10),
            ("5-9", &rates.from_5_to_9),
            ("<5", &rates.under_5),
        ] {
            s.push_str(&format!("{label},{},{},{:.2}\n", b.turns, b.named, b.rate));
        }
        write_file(path, &s)?;
    }
    let json = to_json(&Analysis {
        split,
        venue_suggestion: rates,
        error_histogram,
    });
    match out {
        Some(p) => write_file(p, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn cmd_db_query(
    domain: Domain,
    constraints: Vec<(String, String)>,
    db: Option<&Path>,
    corpus: Option<&Path>,
    limit: Option<usize>,
    t: f64,
) -> CmdResult {
    let database = match (db, corpus) {
        (Some(dir), _) => Database::load_dir(dir).data()?.with_fuzzy_threshold(t),
        (None, Some(root)) => load_db(root, t)?,
        (None, None) => Database::bundled().with_fuzzy_threshold(t),
    };
    let venues = database
        .query(domain, &constraints.into_iter().collect())
        .usage()?;
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    for v in venues.iter().take(limit.unwrap_or(usize::MAX)) {
        writeln!(w, "{}", serde_json::to_string(v).expect("venue serializes")).data()?;
    }
    Ok(())
}
