//! `lextune`: index a collection, search it, evaluate and fuse runs, and tune
//! retrieval configurations with Bayesian optimization.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use lextune_core::bayesopt::{
    parse_history, run_bo_loop, BoConfig, HistoryRecord, RetrievalObjective, DEFAULT_BUDGET, DEFAULT_CANDIDATES,
    DEFAULT_INIT, DEFAULT_SEED,
};
use lextune_core::evaluation::{
    evaluate_run, format_report, per_topic_delta, read_qrels, read_run, write_run, zsum_fuse, Measure, RunFile,
};
use lextune_core::hyperspace::{ConfigPoint, SpaceDef};
use lextune_core::index::{load_index_set, read_corpus, save_index_set, IndexSet};
use lextune_core::retrieval::{read_topics, search_topics, QueryField, DEFAULT_DEPTH};
use lextune_core::{ConfigPoint64, Error, RunFile64};

#[derive(Parser)]
#[command(name = "lextune", version, about = "Lexical retrieval experiments with Bayesian-optimized configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Field {
    Title,
    TitleDesc,
}

impl From<Field> for QueryField {
    fn from(f: Field) -> Self {
        match f {
            Field::Title => QueryField::Title,
            Field::TitleDesc => QueryField::TitleDescription,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build all four stopping/stemming index variants of a corpus.
    Index {
        /// TREC SGML or JSON-lines corpus.
        #[arg(long)]
        corpus: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank every topic and write a TREC run.
    Search {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        topics: PathBuf,
        /// key=value configuration; missing keys take their defaults
        /// (query likelihood, Dirichlet mu=1000, no feedback).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "lextune")]
        tag: String,
        #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = positive)]
        depth: usize,
        #[arg(long, value_enum, default_value = "title")]
        query_field: Field,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a run against relevance judgments.
    Eval {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        qrels: PathBuf,
        /// Comma-separated subset of map, ndcg, P_10.
        #[arg(long, value_delimiter = ',', default_value = "map,ndcg,P_10")]
        measures: Vec<String>,
        /// Also print one line per topic.
        #[arg(long)]
        per_topic: bool,
    },
    /// Combine two runs by summing per-topic z-scored scores.
    Fuse {
        run_a: PathBuf,
        run_b: PathBuf,
        #[arg(long, default_value = "fused")]
        tag: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tune the configuration for MAP with Bayesian optimization.
    Optimize {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        topics: PathBuf,
        #[arg(long)]
        qrels: PathBuf,
        /// Total number of evaluations.
        #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = positive)]
        budget: usize,
        /// Random evaluations before the surrogate is used.
        #[arg(long, default_value_t = DEFAULT_INIT, value_parser = positive)]
        init: usize,
        /// Random candidates scored by expected improvement per step.
        #[arg(long, default_value_t = DEFAULT_CANDIDATES, value_parser = positive)]
        candidates: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = positive)]
        depth: usize,
        #[arg(long, value_enum, default_value = "title")]
        query_field: Field,
        /// Reselect kernel lengthscale and noise by marginal likelihood
        /// every 5 evaluations.
        #[arg(long)]
        refit: bool,
        /// name=lo,hi lines narrowing numeric ranges.
        #[arg(long)]
        ranges: Option<PathBuf>,
        /// History file, one line per evaluation.
        #[arg(long)]
        history: PathBuf,
        /// Continue from an existing history file.
        #[arg(long)]
        resume: bool,
        /// Where to write the best configuration (stdout if omitted).
        #[arg(long)]
        best: Option<PathBuf>,
    },
    /// Per-topic measure differences of runs against a baseline.
    Report {
        #[arg(long, num_args = 1.., required = true)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        qrels: PathBuf,
        #[arg(long, default_value = "map")]
        measure: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the search space reference listing.
    Space {
        #[arg(long)]
        ranges: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lextune: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for bad input, 1 for internal failures.
fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return if err.is_user_error() { 2 } else { 1 };
        }
        if cause.downcast_ref::<io::Error>().is_some() || cause.downcast_ref::<UserError>().is_some() {
            return 2;
        }
    }
    1
}

#[derive(Debug)]
struct UserError(String);

impl std::fmt::Display for UserError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UserError {}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Index { corpus, out } => {
            let docs = read_corpus(&corpus)?;
            if docs.is_empty() {
                return Err(UserError(format!("{}: no documents", corpus.display())).into());
            }
            let set = IndexSet::build(&docs)?;
            save_index_set(&set, &out)?;
            eprintln!("indexed {} documents into {}", docs.len(), out.display());
        }
        Command::Search {
            index,
            topics,
            config,
            tag,
            depth,
            query_field,
            out,
        } => {
            let point = match &config {
                Some(path) => ConfigPoint64::read(path)?,
                None => ConfigPoint::default(),
            };
            SpaceDef::standard().validate(&point)?;
            let set = load_index_set(&index)?;
            let topics = read_topics(&topics)?;
            let rankings = search_topics(
                set.get(point.variant()),
                &topics,
                query_field.into(),
                &point.retrieval,
                depth,
            )?;
            emit(out.as_deref(), &write_run(&RunFile::from_rankings(tag, rankings)))?;
        }
        Command::Eval {
            run,
            qrels,
            measures,
            per_topic,
        } => {
            let measures = measures.iter().map(|m| m.parse()).collect::<Result<Vec<Measure>, _>>()?;
            let run: RunFile64 = read_run(&run)?;
            let qrels = read_qrels(&qrels)?;
            let report = evaluate_run(&run, &qrels)?;
            emit(None, &format_report(&report, &measures, per_topic))?;
        }
        Command::Fuse { run_a, run_b, tag, out } => {
            let a: RunFile64 = read_run(&run_a)?;
            let b: RunFile64 = read_run(&run_b)?;
            emit(out.as_deref(), &write_run(&zsum_fuse(&a, &b, &tag)?))?;
        }
        Command::Optimize {
            index,
            topics,
            qrels,
            budget,
            init,
            candidates,
            seed,
            depth,
            query_field,
            refit,
            ranges,
            history,
            resume,
            best,
        } => {
            let space = match &ranges {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
                    SpaceDef::standard().with_ranges(&text)?
                }
                None => SpaceDef::standard(),
            };
            let config = BoConfig {
                budget,
                init,
                candidates,
                seed,
                refit,
                ..BoConfig::default()
            };
            config.check()?;
            let set = load_index_set(&index)?;
            let topics = read_topics(&topics)?;
            let qrels = read_qrels(&qrels)?;
            let objective = RetrievalObjective {
                indexes: &set,
                topics: &topics,
                field: query_field.into(),
                qrels: &qrels,
                depth,
            };
            let previous: Vec<HistoryRecord<f64>> = if resume && history.exists() {
                let text = fs::read_to_string(&history).with_context(|| history.display().to_string())?;
                parse_history(&text).with_context(|| history.display().to_string())?
            } else {
                Vec::new()
            };
            let file = if resume {
                OpenOptions::new().create(true).append(true).open(&history)
            } else {
                File::create(&history)
            }
            .with_context(|| history.display().to_string())?;
            let mut sink = BufWriter::new(file);
            let state = run_bo_loop(&objective, &space, &config, &previous, |record| {
                sink.write_all(record.to_line().as_bytes())
                    .and_then(|()| sink.flush())
                    .map_err(|e| Error::Invalid(format!("{}: {e}", history.display())))
            })?;
            let (point, map) = state.best().expect("budget is at least one");
            eprintln!("best MAP {map:.4} after {} evaluations", state.history.len());
            emit(best.as_deref(), &point.to_kv())?;
        }
        Command::Report {
            runs,
            baseline,
            qrels,
            measure,
            out,
        } => {
            let measure: Measure = measure.parse()?;
            let runs = runs.iter().map(|p| read_run(p)).collect::<Result<Vec<RunFile64>, _>>()?;
            let baseline: RunFile64 = read_run(&baseline)?;
            let qrels = read_qrels(&qrels)?;
            let table = per_topic_delta(&runs, &baseline, &qrels, measure)?;
            emit(out.as_deref(), &table.to_tsv())?;
        }
        Command::Space { ranges } => {
            let space = match &ranges {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
                    SpaceDef::standard().with_ranges(&text)?
                }
                None => SpaceDef::standard(),
            };
            emit(None, &space.describe())?;
        }
    }
    Ok(())
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| p.display().to_string())?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}
