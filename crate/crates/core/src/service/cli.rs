use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::{serve, Engine, EngineConfig, IngestMode, RetrievalBench, ServeOptions};
use crate::classifier::MlpParams;
use crate::corpus::{
    build_dataset, read_jsonl, read_segments, segment_document, split_dataset, write_jsonl, PairCounts,
    ParaphraseProvider, Segment, SynthConfig, SynthCorpus, TextPair,
};
use crate::embed::MAX_TOKENS;
use crate::error::{Error, Result};
use crate::metrics::{evaluate_classifier_with, Aggregation};
use crate::vecindex::{IvfPqIndex, Strategy, VectorSearch};

#[derive(Debug, Parser)]
#[command(
    name = "plagdet",
    version,
    about = "Text plagiarism detection: segment, index, train, detect, serve"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split plain-text documents into a corpus JSONL file.
    Segment {
        /// A text file or a directory of `.txt` files.
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = MAX_TOKENS)]
        max_tokens: usize,
    },
    /// Write a seeded synthetic corpus JSONL file.
    GenCorpus {
        output: PathBuf,
        #[arg(long, default_value_t = 250)]
        docs: usize,
        #[arg(long, default_value_t = 20)]
        segments_per_doc: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build a labeled pair dataset from a corpus.
    Synth {
        corpus: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        shuffle: usize,
        #[arg(long, default_value_t = 1)]
        imitation: usize,
        #[arg(long, default_value_t = 1)]
        negative: usize,
        /// Negatives whose partner text is itself paraphrased or shuffled.
        #[arg(long, default_value_t = 0)]
        disguised_negative: usize,
        /// Use an external paraphrase service instead of the rule stub.
        #[arg(long)]
        paraphrase_endpoint: Option<String>,
    },
    #[command(subcommand)]
    Index(IndexCommand),
    /// Train the pair classifier on a dataset file.
    Train {
        dataset: PathBuf,
        params_out: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        hyper: HyperArgs,
        /// Fraction held out for evaluation; 0 trains on everything.
        #[arg(long, default_value_t = 0.2)]
        holdout: f64,
        /// Also install the parameters into this engine directory.
        #[arg(long)]
        engine: Option<PathBuf>,
    },
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Load a corpus into an engine directory, creating it if needed.
    Ingest {
        corpus: PathBuf,
        #[arg(long)]
        engine: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        append: bool,
        /// Classifier parameters to install.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Retrieve and classify candidates for a query text (`-` reads stdin).
    Detect {
        query_file: PathBuf,
        #[arg(long)]
        engine: PathBuf,
        #[arg(short, long)]
        k: Option<usize>,
        #[arg(short, long)]
        nprobe: Option<usize>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        engine: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum IndexCommand {
    /// Embed a corpus and write an index file.
    Build {
        corpus: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Search an index file with a query text.
    Query {
        index: PathBuf,
        query_file: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(short, long, default_value_t = 10)]
        k: usize,
        #[arg(short, long)]
        nprobe: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Accuracy, precision, recall and F1 of a parameter file on a dataset.
    Classify {
        params: PathBuf,
        dataset: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum, default_value = "weighted")]
        aggregation: AggregationArg,
    },
    /// Success rate of shuffled-segment queries for each index strategy.
    Retrieve {
        corpus: PathBuf,
        #[command(flatten)]
        config: ConfigArg,
        /// Number of queries; defaults to every segment.
        #[arg(long)]
        queries: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "flat,ivf,ivf_pq")]
        strategies: Vec<StrategyArg>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum AggregationArg {
    Weighted,
    Macro,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum StrategyArg {
    Flat,
    Ivf,
    #[value(name = "ivf_pq")]
    IvfPq,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Flat => Strategy::Flat,
            StrategyArg::Ivf => Strategy::Ivf,
            StrategyArg::IvfPq => Strategy::IvfPq,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArg {
    /// Engine configuration (TOML).
    #[arg(long = "config")]
    pub path: Option<PathBuf>,
}

impl ConfigArg {
    fn load(&self) -> Result<EngineConfig> {
        match &self.path {
            Some(p) => EngineConfig::load(p),
            None => Ok(EngineConfig::default()),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct HyperArgs {
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl HyperArgs {
    fn apply(&self, cfg: &mut EngineConfig) {
        let c = &mut cfg.classifier;
        c.max_epochs = self.epochs.unwrap_or(c.max_epochs);
        c.batch_size = self.batch_size.unwrap_or(c.batch_size);
        c.learning_rate = self.lr.unwrap_or(c.learning_rate);
        c.hidden = self.hidden.unwrap_or(c.hidden);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
    }
}

/// Parses `std::env::args` and runs the command, printing JSON results on
/// stdout and progress on stderr.
pub fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match execute(cli.command, &mut std::io::stdout().lock()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}

pub fn run_from<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidInput(e.to_string()))?;
    execute(cli.command, out)
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn read_query(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn text_files(input: &Path) -> Result<Vec<PathBuf>> {
    if input.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(input)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        files.retain(|p| p.extension().is_some_and(|e| e == "txt"));
        files.sort();
        Ok(files)
    } else {
        Ok(vec![input.to_path_buf()])
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Segment {
            input,
            output,
            max_tokens,
        } => {
            let mut segments: Vec<Segment> = Vec::new();
            for file in text_files(&input)? {
                let doc_id = file
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let text = std::fs::read_to_string(&file)?;
                for mut seg in segment_document(&doc_id, &text, max_tokens) {
                    seg.id = segments.len() as u64;
                    segments.push(seg);
                }
            }
            write_jsonl(&output, &segments)?;
            print_json(out, &serde_json::json!({ "segments": segments.len() }))
        }
        Command::GenCorpus {
            output,
            docs,
            segments_per_doc,
            seed,
        } => {
            let segments = SynthCorpus::generate(&SynthConfig::with_size(docs, segments_per_doc, seed))?.segments();
            write_jsonl(&output, &segments)?;
            print_json(out, &serde_json::json!({ "segments": segments.len() }))
        }
        Command::Synth {
            corpus,
            output,
            seed,
            shuffle,
            imitation,
            negative,
            disguised_negative,
            paraphrase_endpoint,
        } => {
            let segments = read_segments(&corpus)?;
            let provider = match paraphrase_endpoint {
                Some(url) => ParaphraseProvider::external(url),
                None => ParaphraseProvider::rule_stub(seed),
            };
            let counts = PairCounts {
                shuffle,
                imitation,
                negative,
                disguised_negative,
            };
            let pairs = build_dataset(&segments, &provider, seed, counts)?;
            write_jsonl(&output, &pairs)?;
            print_json(out, &serde_json::json!({ "pairs": pairs.len() }))
        }
        Command::Index(IndexCommand::Build { corpus, output, config }) => {
            let mut engine = Engine::new(config.load()?)?;
            let summary = engine.ingest(read_segments(&corpus)?, IngestMode::Replace)?;
            match engine.index() {
                Some(super::EngineIndex::Flat(f)) => f.save(&output)?,
                Some(super::EngineIndex::Ivf(i)) => i.save(&output)?,
                None => return Err(Error::EmptyIndex),
            }
            print_json(out, &summary)
        }
        Command::Index(IndexCommand::Query {
            index,
            query_file,
            config,
            k,
            nprobe,
        }) => {
            let cfg = config.load()?;
            let idx = IvfPqIndex::load(&index)?;
            let h = cfg.provider.build()?.embed(&read_query(&query_file)?)?;
            print_json(out, &VectorSearch::search(&idx, h.values(), k, nprobe)?)
        }
        Command::Train {
            dataset,
            params_out,
            config,
            hyper,
            holdout,
            engine,
        } => {
            let mut cfg = config.load()?;
            hyper.apply(&mut cfg);
            let pairs: Vec<TextPair> = read_jsonl(&dataset)?;
            let trainer = Engine::new(cfg)?;
            let labeled = trainer.embed_pairs(&pairs)?;
            let (train, test) = if holdout > 0.0 {
                split_dataset(&labeled, 1.0 - holdout, trainer.config().seed)?
            } else {
                (labeled, Vec::new())
            };
            let outcome =
                crate::classifier::train_with_callback(&train, &trainer.train_config(), |s| eprintln!("{s}"))?;
            outcome.params.save(&params_out)?;
            if let Some(dir) = engine {
                let mut e = Engine::load(&dir)?;
                e.set_params(outcome.params.clone())?;
                e.save(&dir)?;
            }
            let report = if test.is_empty() {
                None
            } else {
                Some(evaluate_classifier_with(&outcome.params, &test, Aggregation::Weighted)?.0)
            };
            print_json(
                out,
                &serde_json::json!({
                    "train_pairs": train.len(),
                    "test_pairs": test.len(),
                    "history": outcome.history,
                    "test": report,
                }),
            )
        }
        Command::Eval(EvalCommand::Classify {
            params,
            dataset,
            config,
            aggregation,
        }) => {
            let params = MlpParams::load(&params)?;
            let pairs: Vec<TextPair> = read_jsonl(&dataset)?;
            let labeled = Engine::new(config.load()?)?.embed_pairs(&pairs)?;
            let agg = match aggregation {
                AggregationArg::Weighted => Aggregation::Weighted,
                AggregationArg::Macro => Aggregation::Macro,
            };
            let (report, matrix) = evaluate_classifier_with(&params, &labeled, agg)?;
            print_json(out, &serde_json::json!({ "report": report, "confusion": matrix }))
        }
        Command::Eval(EvalCommand::Retrieve {
            corpus,
            config,
            queries,
            strategies,
        }) => {
            let cfg = config.load()?;
            let bench = RetrievalBench::prepare(&read_segments(&corpus)?, &cfg, queries)?;
            let results = strategies
                .into_iter()
                .map(|s| bench.run(s.into(), &cfg))
                .collect::<Result<Vec<_>>>()?;
            print_json(out, &results)
        }
        Command::Ingest {
            corpus,
            engine,
            config,
            append,
            params,
        } => {
            let mut e = if engine.join(super::engine::CONFIG_FILE).exists() && config.path.is_none() {
                Engine::load(&engine)?
            } else {
                Engine::new(config.load()?)?
            };
            let mode = if append {
                IngestMode::Append
            } else {
                IngestMode::Replace
            };
            let summary = e.ingest_file(&corpus, mode)?;
            if let Some(p) = params {
                e.set_params(MlpParams::load(&p)?)?;
            }
            e.save(&engine)?;
            print_json(out, &summary)
        }
        Command::Detect {
            query_file,
            engine,
            k,
            nprobe,
        } => {
            let e = Engine::load(&engine)?;
            print_json(out, &e.detect(&read_query(&query_file)?, k, nprobe)?)
        }
        Command::Serve {
            engine,
            config,
            bind,
            ui_dir,
        } => {
            let e = match &engine {
                Some(dir) if dir.join(super::engine::CONFIG_FILE).exists() => Engine::load(dir)?,
                _ => Engine::new(config.load()?)?,
            };
            serve(
                e,
                &bind,
                ServeOptions {
                    ui_dir,
                    engine_dir: engine,
                },
            )
        }
    }
}
