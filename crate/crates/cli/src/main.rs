use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

mod commands;

#[derive(Debug, Parser, Serialize)]
#[command(name = "compoundkit", version, about = "Compound segmentation, alignment and compound-aware tokenization")]
struct Cli {
    /// Cap on worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
enum Command {
    /// Mine hyphenation training pairs from raw text.
    Mine(MineArgs),
    /// Build train/eval splits from a compound lexicon.
    BuildDataset(BuildDatasetArgs),
    /// Align normalized constituents onto surface words.
    Align(AlignArgs),
    /// Predict constituents with the frequency-based splitter.
    SplitPredict(SplitPredictArgs),
    /// Train a unigram tokenizer.
    TrainTokenizer(TrainTokenizerArgs),
    /// Encode text lines with a trained tokenizer.
    Encode(EncodeArgs),
    /// Percentage of hard compounds under a tokenizer.
    Hardness(HardnessArgs),
    /// Which monolingual tokenizers contain each multilingual piece.
    TokenOrigins(TokenOriginsArgs),
    /// Score predictions against gold entries.
    Eval(EvalArgs),
}

#[derive(Debug, Args, Serialize)]
struct MineArgs {
    #[arg(long, required = true, num_args = 1..)]
    corpus: Vec<PathBuf>,
    #[arg(long)]
    lang: String,
    /// Hyphenated/plain frequency ratio threshold (default e^-6).
    #[arg(long)]
    threshold: Option<f64>,
    /// Keep every hyphenated form regardless of the ratio test.
    #[arg(long)]
    no_ratio_filter: bool,
    #[arg(long)]
    out: PathBuf,
    /// Also write the frequency table as TSV.
    #[arg(long)]
    freq_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct BuildDatasetArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long, default_value_t = 100)]
    min_lang_size: usize,
    #[arg(long, default_value_t = 1000)]
    eval_cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = compoundkit::dataset::DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct AlignArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Use exhaustive enumeration instead of the bounded search.
    #[arg(long)]
    bruteforce: bool,
    #[arg(long, default_value_t = compoundkit::align::DEFAULT_MAX_CANDIDATES)]
    max_candidates: u64,
}

#[derive(Debug, Args, Serialize)]
struct SplitPredictArgs {
    #[arg(long)]
    freq_table: PathBuf,
    /// JSON splitter configuration; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct TrainTokenizerArgs {
    /// Corpus files, optionally prefixed with a language: `de=path`.
    #[arg(long, required = true, num_args = 1..)]
    corpus: Vec<String>,
    #[arg(long, default_value_t = 8000)]
    vocab_size: usize,
    #[arg(long, default_value = "whitespace")]
    mode: String,
    /// gold | freq | predictions:FILE
    #[arg(long)]
    segmenter: Option<String>,
    /// Gold entries (JSONL) for `--segmenter gold`.
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Frequency table for `--segmenter freq`.
    #[arg(long)]
    freq_table: Option<PathBuf>,
    #[arg(long)]
    splitter_config: Option<PathBuf>,
    /// Language sampling exponent; used with `--samples`.
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    /// Number of lines to sample across languages (all lines when absent).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct EncodeArgs {
    #[arg(long)]
    model: PathBuf,
    /// Input text (stdin when absent).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct HardnessArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    /// Report JSON (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-word classification as JSONL.
    #[arg(long)]
    details: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct TokenOriginsArgs {
    #[arg(long)]
    multi: PathBuf,
    /// Monolingual models as `lang=path`.
    #[arg(long, required = true, num_args = 1..)]
    mono: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct EvalArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// segmentation | normalization | germanet-head
    #[arg(long, default_value = "segmentation")]
    mode: String,
    /// Tokenizer for the easy/hard breakdown.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    report: PathBuf,
    /// Also write the plain-text table here.
    #[arg(long)]
    table: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    log::info!("config: {}", serde_json::to_string(&cli).unwrap_or_default());
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not configure thread pool: {e}");
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e
                .downcast_ref::<compoundkit::Error>()
                .is_some_and(|e| !e.is_data_error());
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
