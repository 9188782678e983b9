use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "spmiti",
    version,
    about = "Select software protections with a mini-max search"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and check a knowledge base and a model.
    Validate(Inputs),
    /// Compute the code correlation sets of a model.
    Prepare(PrepareArgs),
    /// Search for the best protection solution.
    Optimize(OptimizeArgs),
    /// Time the search on synthetic instances and write CSV.
    Bench(BenchArgs),
    /// Render the search tree of a small instance.
    Explain(ExplainArgs),
}

#[derive(Debug, Args)]
pub struct Inputs {
    #[arg(long)]
    pub kb: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrepareFormat {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: PrepareFormat,
    /// Row name in table output.
    #[arg(long, default_value = "model")]
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Defender {
    /// Generated solution space, one tree per code correlation set.
    PerCcs,
    /// Generated solution space, one tree for the whole model.
    Monolithic,
    /// The model's candidate solutions.
    Candidates,
    /// The model's candidate solutions scored by its scripted evaluation.
    Scripted,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// One defender turn plus `depth - 1` attacker turns.
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    #[arg(long, default_value = "optimized")]
    pub engine: String,
    /// Comma-separated optimizations: alpha_beta, aspiration, tt, futility,
    /// ext_futility, razoring, or the presets `exact` and `all`.
    #[arg(long, default_value = "exact")]
    pub enable: String,
    /// Forward-pruning margins, e.g. `f=0.5,ef=1,rz=2`.
    #[arg(long, default_value = "")]
    pub margins: String,
    #[arg(long, default_value_t = 10)]
    pub top_n: usize,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 1.0)]
    pub aspiration_width: f64,
    /// Stop after this many solutions per tree; 0 walks the whole space.
    #[arg(long, default_value_t = 10_000)]
    pub max_solutions: usize,
    /// Maximum DSPs per protection objective.
    #[arg(long, default_value_t = 3)]
    pub sigma: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Enumerate every solution instead of the seeded walk.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long)]
    pub skip_discouraged: bool,
    /// JSON list of `{cp, artifact}` to start the walk from.
    #[arg(long)]
    pub seed_solution: Option<PathBuf>,
    /// Where the defender's moves come from; scripted when the model has a
    /// scripted evaluation, per-ccs otherwise.
    #[arg(long, value_enum)]
    pub defender: Option<Defender>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// A previous JSON report whose values center the aspiration windows.
    #[arg(long)]
    pub warm_start: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub report: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
    pub po_counts: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "8")]
    pub path_counts: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "3,4")]
    pub depths: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "plain,optimized")]
    pub engines: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Run cells beyond the desk-scale guardrails.
    #[arg(long)]
    pub force: bool,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Emit DOT (the only format).
    #[arg(long, default_value_t = true)]
    pub dot: bool,
    /// Refuse trees with more nodes than this.
    #[arg(long, default_value_t = spmiti_core::explorer::DOT_NODE_LIMIT)]
    pub max_nodes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
