use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sparsegnn::gnn::ModelKind;
use sparsegnn::ReduceOp;

#[derive(Debug, Parser)]
#[command(name = "sparsegnn", version, about = "Auto-tuned sparse kernels and GNN training")]
pub struct Cli {
    /// Worker threads (overrides SPARSEGNN_THREADS; default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Floating-point precision for matrices and kernels.
    #[arg(long, global = true, value_enum, default_value_t = Precision::F32)]
    pub precision: Precision,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    F32,
    F64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep embedding sizes and write a tuning report.
    Tune(TuneArgs),
    /// Time trusted against specialized SpMM at one embedding size.
    Bench(BenchArgs),
    /// Train a two-layer GNN for node classification.
    Train(TrainArgs),
    /// Run the built-in verification suites.
    Verify(VerifyArgs),
}

/// Where the graph comes from: a Matrix Market file or a synthetic
/// planted-partition description.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// Matrix Market adjacency file.
    #[arg(long)]
    pub graph: Option<PathBuf>,

    /// Synthetic planted partition, e.g. `n=400,c=4,p_intra=0.1,p_inter=0.01,f=16,noise=0.1`.
    #[arg(long)]
    pub synth: Option<String>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub source: GraphSource,

    /// Report file to write.
    #[arg(long, default_value = "tuning_report.csv")]
    pub out: PathBuf,

    /// Comma-separated K values (default: the full specialization sweep).
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,

    /// Timed repetitions per kernel and K (median is reported).
    #[arg(long, default_value_t = 5)]
    pub reps: usize,

    /// Seed for synthetic graphs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub source: GraphSource,

    /// Embedding size (dense operand width).
    #[arg(long)]
    pub k: usize,

    #[arg(long, default_value = "sum", value_parser = parse_reduce)]
    pub reduce: ReduceOp,

    #[arg(long, default_value_t = 10)]
    pub reps: usize,

    /// Time the trusted kernel only.
    #[arg(long)]
    pub no_tuned: bool,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Corrupt the specialized output before the equality check.
    #[arg(long, hide = true)]
    pub inject_mismatch: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: GraphSource,

    /// Node features (required with --graph).
    #[arg(long, requires = "graph")]
    pub features: Option<PathBuf>,

    /// Node labels (required with --graph).
    #[arg(long, requires = "graph")]
    pub labels: Option<PathBuf>,

    /// Training mask (default: every node).
    #[arg(long, requires = "graph")]
    pub mask: Option<PathBuf>,

    #[arg(long, default_value = "gcn", value_parser = parse_model)]
    pub model: ModelKind,

    #[arg(long, default_value_t = 32)]
    pub hidden: usize,

    #[arg(long, default_value_t = 100)]
    pub epochs: usize,

    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,

    /// Seed for weight initialization and synthetic data.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Route every SpMM to the trusted kernel.
    #[arg(long)]
    pub no_tuned: bool,

    /// Rebuild the adjacency transpose on every backward pass.
    #[arg(long)]
    pub no_cache: bool,

    /// Write per-epoch statistics as CSV.
    #[arg(long)]
    pub stats: Option<PathBuf>,

    /// Print only the summary, not one line per epoch.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Upper bound on random matrix dimensions.
    #[arg(long, default_value_t = 512)]
    pub max_n: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Force the named suite to fail (exercises the failure path).
    #[arg(long, hide = true)]
    pub inject_failure: Option<String>,
}

fn parse_reduce(s: &str) -> Result<ReduceOp, String> {
    s.parse().map_err(|e: sparsegnn::Error| e.to_string())
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: sparsegnn::Error| e.to_string())
}
