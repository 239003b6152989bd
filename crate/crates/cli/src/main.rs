// Copyright 2026 The socialtag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! `socialtag`: mine, induce, recommend, evaluate, generate and replay.

mod cache;
mod commands;
mod manifest;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use socialtag::eval::{InputStrategy, ReportFormat, SplitMode};
use socialtag::miner::{Closedness, MinSupport};
use socialtag::recommend::Method;
use socialtag::social::SourceKind;

#[derive(Parser, Debug)]
#[command(name = "socialtag", version, about = "Tag recommendation from association patterns over social sources")]
pub struct Cli {
    /// Seed for splits and query inputs (default 0) and synthetic data
    /// (default: the generator config's seed).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Markdown,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Tsv => ReportFormat::Tsv,
            Format::Markdown => ReportFormat::Markdown,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mine closed frequent tagsets and the pairwise co-occurrence index.
    Mine(MineArgs),
    /// Induce a code table from closed frequent tagsets.
    Induce(InduceArgs),
    /// Answer a query stream.
    Recommend(RecommendArgs),
    /// Run the offline evaluation over a method × source × k grid.
    Eval(EvalArgs),
    /// Generate a synthetic corpus with planted communities and groups.
    Synth(SynthArgs),
    /// Replay a query stream through the batcher and report batching.
    BatchReplay(ReplayArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CorpusArgs {
    /// Transactions file: `user<TAB>group|-<TAB>interest|-<TAB>tag,tag,...`.
    pub transactions: PathBuf,

    /// Friendship graph file, one `user user` edge per line.
    #[arg(long)]
    pub graph: Option<PathBuf>,

    /// Group membership file, one `group<TAB>user` pair per line.
    #[arg(long)]
    pub groups: Option<PathBuf>,

    /// Drop transactions with fewer distinct tags (0 keeps all).
    #[arg(long, default_value_t = 2)]
    pub min_tags: usize,
}

#[derive(Args, Debug)]
pub struct MineArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Fraction of transactions (with a decimal point) or absolute count.
    #[arg(long, default_value = "0.0007", value_parser = parse_minsup)]
    pub minsup: MinSupport,

    #[arg(long, default_value_t = 3)]
    pub maxlen: usize,

    #[arg(long, default_value_t = 50)]
    pub top_m: usize,

    #[arg(long, default_value = "bounded", value_parser = parse_closedness)]
    pub closedness: Closedness,

    /// Also write the co-occurrence index here.
    #[arg(long)]
    pub index: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InduceArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[arg(long, default_value = "0.00007", value_parser = parse_minsup)]
    pub minsup: MinSupport,

    #[arg(long, default_value_t = 3)]
    pub maxlen: usize,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Far)]
    pub method: MethodArg,

    /// Minimum support for NAR's closed tagsets.
    #[arg(long, default_value = "0.0007", value_parser = parse_minsup)]
    pub nar_minsup: MinSupport,

    /// Minimum support for FAR's code table candidates.
    #[arg(long, default_value = "0.00007", value_parser = parse_minsup)]
    pub far_minsup: MinSupport,

    #[arg(long, default_value_t = 3)]
    pub maxlen: usize,

    #[arg(long, default_value_t = 50)]
    pub top_m: usize,

    /// Recommendations per query.
    #[arg(long, default_value_t = 10)]
    pub limit: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Par,
    Nar,
    Far,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Par => Method::Par,
            MethodArg::Nar => Method::Nar,
            MethodArg::Far => Method::Far,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    /// ck, uk, personomy, social-personomy, batched, social-batched or community.
    #[arg(long, default_value = "ck", value_parser = parse_source_kind)]
    pub source: SourceKind,

    /// Friendship hops for uk and the social sources.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,

    /// Selections with fewer transactions fall back to collective knowledge.
    #[arg(long, default_value_t = 0)]
    pub fallback_min: usize,

    /// Users whose groups hold fewer transactions are treated as ungrouped.
    #[arg(long, default_value_t = 1)]
    pub min_group_transactions: usize,
}

#[derive(Args, Debug)]
pub struct RecommendArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    /// Query stream: `user<TAB>interest|-<TAB>tag,tag,...`.
    #[arg(long)]
    pub queries: PathBuf,

    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub source: SourceArgs,

    /// Reuse mined collective-knowledge models stored here.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Transactions file (not needed with --replay).
    #[arg(required_unless_present = "replay")]
    pub transactions: Option<PathBuf>,

    #[arg(long)]
    pub graph: Option<PathBuf>,

    #[arg(long)]
    pub groups: Option<PathBuf>,

    #[arg(long, default_value_t = 2)]
    pub min_tags: usize,

    /// Comma-separated methods.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "far")]
    pub method: Vec<MethodArg>,

    /// Comma-separated sources, each `kind` or `kind:degree`.
    #[arg(long, value_delimiter = ',', default_value = "ck")]
    pub source: Vec<String>,

    /// Degree for sources listed without one.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,

    /// Comma-separated query sizes.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub k: Vec<usize>,

    #[arg(long, default_value = "cv5", value_parser = parse_split)]
    pub split: SplitMode,

    #[arg(long, default_value = "uniform", value_parser = parse_strategy)]
    pub strategy: InputStrategy,

    /// Queries per batch for batched sources (default: the whole test set).
    #[arg(long)]
    pub batch_size: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub fallback_min: usize,

    #[arg(long, default_value_t = 1)]
    pub min_group_transactions: usize,

    #[arg(long, default_value = "0.0007", value_parser = parse_minsup)]
    pub nar_minsup: MinSupport,

    #[arg(long, default_value = "0.00007", value_parser = parse_minsup)]
    pub far_minsup: MinSupport,

    #[arg(long, default_value_t = 3)]
    pub maxlen: usize,

    #[arg(long, default_value_t = 50)]
    pub top_m: usize,

    #[arg(long, default_value_t = 10)]
    pub limit: usize,

    /// Where to write the run manifest (default: next to --out, else stderr).
    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// Re-run the experiments recorded in a manifest.
    #[arg(long, conflicts_with_all = ["transactions", "graph", "groups"])]
    pub replay: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// JSON file with generator settings; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Directory for transactions.tsv, graph.tsv and groups.tsv.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,

    #[arg(long)]
    pub users: Option<usize>,

    #[arg(long)]
    pub communities: Option<usize>,

    #[arg(long)]
    pub casual_users: Option<usize>,

    #[arg(long)]
    pub groups: Option<usize>,

    /// Chance that a tag is drawn from the user's topical pool.
    #[arg(long)]
    pub affinity: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,

    #[arg(long)]
    pub queries: PathBuf,

    #[command(flatten)]
    pub model: ModelArgs,

    /// Widen each batch to friends within this many hops.
    #[arg(long)]
    pub degree: Option<usize>,

    #[arg(long, default_value_t = 100)]
    pub max_queries: usize,

    /// Milliseconds a batch may stay open after its first query.
    #[arg(long)]
    pub max_wait: Option<u64>,

    /// Milliseconds between consecutive query arrivals.
    #[arg(long, default_value_t = 0)]
    pub interval_ms: u64,

    #[arg(long, default_value_t = 0)]
    pub fallback_min: usize,
}

fn parse_minsup(s: &str) -> Result<MinSupport, String> {
    s.parse::<MinSupport>().map_err(|e| e.to_string())
}

fn parse_closedness(s: &str) -> Result<Closedness, String> {
    s.parse::<Closedness>().map_err(|e| e.to_string())
}

fn parse_source_kind(s: &str) -> Result<SourceKind, String> {
    s.parse()
}

fn parse_split(s: &str) -> Result<SplitMode, String> {
    s.parse()
}

fn parse_strategy(s: &str) -> Result<InputStrategy, String> {
    s.parse()
}

/// Writes `text` to `path`, or stdout without one.
pub fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let ctx = commands::Context {
        seed: cli.seed,
        out: cli.out,
        format: cli.format,
    };
    let result = match cli.command {
        Command::Mine(a) => commands::mine(&ctx, a),
        Command::Induce(a) => commands::induce(&ctx, a),
        Command::Recommend(a) => commands::recommend(&ctx, a),
        Command::Eval(a) => commands::eval(&ctx, a),
        Command::Synth(a) => commands::synth(&ctx, a),
        Command::BatchReplay(a) => commands::batch_replay(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
