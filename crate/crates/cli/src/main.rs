//! `treecover`: generators, cover builders, verification, query services
//! and the routing simulator behind one binary.

mod artifact;
mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "treecover",
    version,
    about = "Tree covers and the distance structures built from them"
)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel sections. Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Print a short human-readable summary to stderr.
    #[arg(long, global = true)]
    pub human: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance.
    Gen(GenArgs),
    /// Build a tree cover and verify it.
    BuildCover(BuildArgs),
    /// Certify a cover or a derived structure against a bound suite.
    Verify(VerifyArgs),
    /// Build the separator distance oracle and answer queries.
    Oracle(OracleArgs),
    /// Build distance labels from a cover.
    Label(LabelArgs),
    /// Simulate routes over a cover and write a hop-by-hop trace.
    Route(RouteArgs),
    /// Run queries against a cover and report work counters.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    PartialKTree,
    Grid,
    RandomTree,
    Gnp,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: Option<usize>,
    /// Width of the k-tree for `partial-k-tree`.
    #[arg(long, default_value_t = 2)]
    pub width: usize,
    /// Probability of keeping each non-spanning edge of the k-tree.
    #[arg(long, default_value_t = 0.7)]
    pub keep: f64,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    #[arg(long, default_value_t = 1)]
    pub max_weight: u64,
    /// Output graph file; `.json` selects JSON, anything else the edge list.
    /// Partial k-trees also get `<out>.td`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dedupe {
    Reject,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SepMode {
    Td,
    Heuristic,
    Exact,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Graph file (`.json` or edge list).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Tree decomposition in PACE `.td` format.
    #[arg(long)]
    pub td: Option<PathBuf>,
    /// Separator source; defaults to `td` when `--td` is given.
    #[arg(long, value_enum)]
    pub sep_mode: Option<SepMode>,
    #[arg(long, value_enum, default_value_t = Dedupe::Reject)]
    pub dedupe: Dedupe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Spanning,
    Metric,
    Hst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    HstRealization,
    SptStar,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long)]
    pub full: bool,
    #[arg(long, value_enum, default_value_t = StrategyArg::HstRealization)]
    pub strategy: StrategyArg,
    /// Cover artifact (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Verification report (CSV).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write the HSTs of an HST cover to this JSON file.
    #[arg(long)]
    pub dump_hst: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Cover artifact; required for every suite except `oracle`.
    #[arg(long)]
    pub cover: Option<PathBuf>,
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub suite: String,
    /// `k` for the `oracle` suite.
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// Run record (JSON); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Appends one CSV row per check.
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Constant of the forest-stretch bound.
    #[arg(long)]
    pub forest_k: Option<f64>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// `all`, `random:<count>`, or `u-v,u-v,...`.
    #[arg(long, default_value = "random:100")]
    pub pairs: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct LabelArgs {
    #[arg(long)]
    pub cover: PathBuf,
    /// Convert HSTs to trees instead of using LCA labels.
    #[arg(long)]
    pub convert_hst: bool,
    /// Pairs to answer from labels, as for `oracle`.
    #[arg(long)]
    pub pairs: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct RouteArgs {
    #[arg(long)]
    pub cover: PathBuf,
    /// `all`, `random:<count>`, or `u-v,u-v,...`.
    #[arg(long, default_value = "all")]
    pub pairs: String,
    /// Route without the header cursor.
    #[arg(long)]
    pub strict_tz: bool,
    /// Trace CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub cover: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub queries: usize,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.max(1))
        .build_global()
    {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
