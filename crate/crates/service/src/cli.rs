//! The `praise` command line.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use axum::http::HeaderValue;
use clap::{Args, Parser, Subcommand, ValueEnum};
use praise_core::annotation::{
    label_distribution, load_corpus, write_corpus, Corpus, LabelDistribution, SpanSource,
};
use praise_core::bundled;
use praise_core::experiment::{
    correlate_ratings, emit_finetune_dataset, load_ratings, make_partitions, split_train_test,
    summarize_runs, PartitionPlan, SplitSpec, DEFAULT_PARTITION_SIZES, DEFAULT_SEEDS_PER_SIZE,
};
use praise_core::feedback::FeedbackTemplates;
use praise_core::llm::{
    build_highlight_prompt, ChatProvider, ClientConfig, FixtureStore, HttpChatClient,
    RecordingClient, ReplayClient,
};
use praise_core::metrics::MiouConfig;
use serde::{Deserialize, Serialize};

use crate::api::{router, AppState};
use crate::evaluation::{evaluate_corpus, EvaluationReport};

pub const CORS_ORIGIN_ENV: &str = "PRAISE_CORS_ORIGIN";

#[derive(Debug, Parser)]
#[command(
    name = "praise",
    version,
    about = "Highlight and score effort/outcome praise in tutor responses"
)]
pub struct Cli {
    /// Seed for shuffling and sampling; also labels evaluation runs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// False-positive weight of the modified IoU.
    #[arg(long, global = true, default_value_t = MiouConfig::DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Output file (or directory for split/partitions).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Highlight every response of a corpus and score it against gold spans.
    Evaluate(EvaluateArgs),
    /// Shuffle a corpus and cut it into train.jsonl and test.jsonl.
    Split(SplitArgs),
    /// Sample seeded training subsets of several sizes.
    Partitions(PartitionArgs),
    /// Write chat fine-tuning records for a corpus.
    FinetunePrep(CorpusArgs),
    /// Correlate span scores with coder ratings.
    Correlate(CorrelateArgs),
    /// Token label distribution of a corpus.
    Stats(CorpusArgs),
    /// Summarize several evaluation reports by training size.
    Report(ReportArgs),
    /// Build a replay fixture file from recorded replies.
    Fixture(FixtureArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Line-delimited corpus; the bundled mini-corpus when omitted.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Replay,
    Live,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BundledModel {
    #[value(name = "gpt-3.5")]
    Gpt35,
    #[value(name = "gpt-4")]
    Gpt4,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, value_enum, default_value = "replay")]
    pub mode: ModeArg,
    /// Replay fixture file; bundled replies are used when omitted.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gpt-3.5")]
    pub bundled: BundledModel,
    /// Model id reported for a custom fixture file.
    #[arg(long, default_value = "replay")]
    pub model_id: String,
    /// In live mode, save every reply as a fixture file.
    #[arg(long)]
    pub record: Option<PathBuf>,
    /// Training size that produced the model; defaults to the corpus size.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub concurrency: usize,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value_t = 0.5)]
    pub fraction: f64,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Training corpus to sample from.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_PARTITION_SIZES)]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_SEEDS_PER_SIZE)]
    pub seeds_per_size: usize,
    /// Also write a fine-tuning file next to every partition.
    #[arg(long)]
    pub finetune: bool,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Evaluation report written by `evaluate --out`.
    #[arg(long)]
    pub scores: PathBuf,
    /// CSV with response_id,coder_id,effort_rating,outcome_rating.
    #[arg(long)]
    pub ratings: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Evaluation reports, one per fine-tuned model.
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    /// Size of the full corpus, to show sizes as percentages.
    #[arg(long)]
    pub corpus_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    /// Lines of {"text": ..., "reply": ...}.
    #[arg(long)]
    pub replies: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Replay fixture file; the bundled demo replies when omitted.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// Feedback templates TOML; the bundled wording when omitted.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Browser origin allowed to call the API.
    #[arg(long, env = CORS_ORIGIN_ENV, default_value = "http://localhost:5173")]
    pub cors_origin: String,
}

#[derive(Debug, Deserialize)]
struct RecordedReply {
    text: String,
    reply: String,
}

#[derive(Debug, Serialize)]
struct StatsOutput {
    corpus: String,
    distribution: LabelDistribution,
}

fn read_corpus(args: &CorpusArgs) -> Result<(String, Corpus)> {
    match &args.corpus {
        None => Ok(("mini-corpus".to_string(), bundled::mini_corpus())),
        Some(path) => {
            let file =
                File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            let corpus = load_corpus(BufReader::new(file))
                .with_context(|| format!("cannot load corpus {}", path.display()))?;
            let name = path.file_stem().map_or_else(
                || path.display().to_string(),
                |s| s.to_string_lossy().into_owned(),
            );
            Ok((name, corpus))
        }
    }
}

fn write_out(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn out_dir(out: Option<&Path>) -> Result<PathBuf> {
    let dir = out.map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    Ok(dir)
}

fn write_corpus_file(path: &Path, corpus: &Corpus) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    write_corpus(corpus, BufWriter::new(file))?;
    Ok(())
}

pub async fn run(cli: Cli) -> Result<()> {
    let cfg = MiouConfig::new(cli.alpha)?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Evaluate(args) => evaluate(args, cfg, cli.seed, out).await,
        Command::Split(args) => {
            let (_, corpus) = read_corpus(&args.corpus)?;
            let spec = SplitSpec {
                train_fraction: args.fraction,
                seed: cli.seed,
            };
            let (train, test) = split_train_test(&corpus, spec)?;
            let dir = out_dir(out)?;
            write_corpus_file(&dir.join("train.jsonl"), &train)?;
            write_corpus_file(&dir.join("test.jsonl"), &test)?;
            println!("train {}  test {}", train.len(), test.len());
            Ok(())
        }
        Command::Partitions(args) => {
            let (_, train) = read_corpus(&CorpusArgs {
                corpus: Some(args.train),
            })?;
            let plan = PartitionPlan {
                sizes: args.sizes,
                seeds_per_size: args.seeds_per_size,
                base_seed: cli.seed,
            };
            let dir = out_dir(out)?;
            for p in make_partitions(&train, &plan)? {
                let stem = format!("partition-{:03}-seed{}", p.size, p.seed);
                write_corpus_file(&dir.join(format!("{stem}.jsonl")), &p.subset)?;
                if args.finetune {
                    let file = File::create(dir.join(format!("{stem}.finetune.jsonl")))?;
                    emit_finetune_dataset(&p.subset, BufWriter::new(file))?;
                }
                println!("{stem}  {} responses", p.subset.len());
            }
            Ok(())
        }
        Command::FinetunePrep(args) => {
            let (_, corpus) = read_corpus(&args)?;
            let count = match out {
                Some(path) => {
                    let file = File::create(path)
                        .with_context(|| format!("cannot create {}", path.display()))?;
                    emit_finetune_dataset(&corpus, BufWriter::new(file))?
                }
                None => emit_finetune_dataset(&corpus, io::stdout().lock())?,
            };
            eprintln!("wrote {count} fine-tuning records");
            Ok(())
        }
        Command::Correlate(args) => {
            let report: EvaluationReport = serde_json::from_str(
                &fs::read_to_string(&args.scores)
                    .with_context(|| format!("cannot read {}", args.scores.display()))?,
            )
            .with_context(|| format!("{} is not an evaluation report", args.scores.display()))?;
            let file = File::open(&args.ratings)
                .with_context(|| format!("cannot open {}", args.ratings.display()))?;
            let ratings = load_ratings(BufReader::new(file))?;
            let table = correlate_ratings(&report.records, &ratings)?;
            print!("{}", table.render_table());
            if let Some(path) = out {
                write_out(Some(path), &to_json(&table)?)?;
            }
            Ok(())
        }
        Command::Stats(args) => {
            let (name, corpus) = read_corpus(&args)?;
            let distribution = label_distribution(&corpus, SpanSource::Gold)?;
            println!("{}", LabelDistribution::render_header());
            println!("{}", distribution.render_row(&name));
            if let Some(path) = out {
                write_out(
                    Some(path),
                    &to_json(&StatsOutput {
                        corpus: name,
                        distribution,
                    })?,
                )?;
            }
            Ok(())
        }
        Command::Report(args) => {
            let mut groups = Vec::new();
            for path in &args.runs {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                let report: EvaluationReport = serde_json::from_str(&text)
                    .with_context(|| format!("{} is not an evaluation report", path.display()))?;
                groups.push(report.group());
            }
            let summary = summarize_runs(&groups)?;
            print!("{}", summary.render_table(args.corpus_size));
            if let Some(path) = out {
                write_out(Some(path), &to_json(&summary)?)?;
            }
            Ok(())
        }
        Command::Fixture(args) => {
            let file = File::open(&args.replies)
                .with_context(|| format!("cannot open {}", args.replies.display()))?;
            let mut store = FixtureStore::default();
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let recorded: RecordedReply =
                    serde_json::from_str(&line).with_context(|| format!("line {}", i + 1))?;
                let prompt = build_highlight_prompt(&recorded.text)
                    .with_context(|| format!("line {}", i + 1))?;
                store.insert(&prompt.messages, recorded.reply);
            }
            write_out(out, &store.to_json())
        }
        Command::Serve(args) => serve(args, cfg).await,
    }
}

async fn evaluate(
    args: EvaluateArgs,
    cfg: MiouConfig,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    let (_, corpus) = read_corpus(&args.corpus)?;
    if corpus.is_empty() {
        bail!("corpus is empty");
    }
    let size = args.size.unwrap_or(corpus.len());
    let report = match args.mode {
        ModeArg::Replay => {
            if args.record.is_some() {
                bail!("--record only applies to live mode");
            }
            let client = match &args.fixtures {
                Some(path) => ReplayClient::new(args.model_id.clone(), FixtureStore::load(path)?),
                None => match args.bundled {
                    BundledModel::Gpt35 => bundled::gpt35_replay(),
                    BundledModel::Gpt4 => bundled::gpt4_replay(),
                },
            };
            evaluate_corpus(&client, &corpus, cfg, size, seed, args.concurrency).await
        }
        ModeArg::Live => {
            let client = RecordingClient::new(HttpChatClient::new(ClientConfig::from_env()?)?);
            let report = evaluate_corpus(&client, &corpus, cfg, size, seed, args.concurrency).await;
            if let Some(path) = &args.record {
                client.recorded().save(path)?;
            }
            report
        }
    };
    print!("{}", report.render());
    if let Some(path) = out {
        write_out(Some(path), &to_json(&report)?)?;
    }
    if report.records.is_empty() {
        bail!("no response could be scored");
    }
    Ok(())
}

async fn serve(args: ServeArgs, cfg: MiouConfig) -> Result<()> {
    let replay: Arc<dyn ChatProvider> = match &args.fixtures {
        Some(path) => Arc::new(ReplayClient::new("replay", FixtureStore::load(path)?)),
        None => Arc::new(bundled::demo_replay()),
    };
    let live: Option<Arc<dyn ChatProvider>> = match ClientConfig::from_env() {
        Ok(config) => Some(Arc::new(HttpChatClient::new(config)?)),
        Err(e) => {
            tracing::info!("live mode disabled: {e}");
            None
        }
    };
    let templates = match &args.templates {
        Some(path) => FeedbackTemplates::load(path)?,
        None => FeedbackTemplates::default(),
    };
    let origin = HeaderValue::from_str(&args.cors_origin)
        .with_context(|| format!("bad CORS origin `{}`", args.cors_origin))?;
    let app = router(AppState::new(replay, live, templates, cfg), Some(origin));
    let listener = tokio::net::TcpListener::bind(args.addr)
        .await
        .with_context(|| format!("cannot bind {}", args.addr))?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
