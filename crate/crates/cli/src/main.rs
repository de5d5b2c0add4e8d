mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cohortnet::classify::PeriodRange;

#[derive(Parser)]
#[command(
    name = "cohortnet",
    version,
    about = "Cohort-based analysis of frame interaction networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics per frame.
    Stats(RunArgs),
    /// Per-period series, cohort matrices and edge lists per frame.
    Analyze(AnalyzeArgs),
    /// Hypothesis verdict per frame.
    Classify(ClassifyArgs),
    /// Synthetic dataset for one regime.
    Generate(GenerateArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// Input dataset; repeat for several files. `.csv`/`.tsv` are read as
    /// delimited, anything else as JSON lines.
    #[arg(long = "input", short = 'i', value_name = "PATH")]
    inputs: Vec<PathBuf>,
    /// Frame definitions (TOML or JSON). Defaults to the built-in frames.
    #[arg(long, value_name = "PATH")]
    frames: Option<PathBuf>,
    /// Window width in hours [default: 72].
    #[arg(long, value_name = "HOURS")]
    window_hours: Option<u64>,
    /// Output directory [default: out].
    #[arg(long, short = 'o', value_name = "DIR")]
    out: Option<PathBuf>,
    /// Run configuration file (TOML or JSON); flags take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Use cumulative snapshots instead of per-window ones.
    #[arg(long)]
    cumulative: bool,
    /// Count users in periods before their first authored record
    /// [default: true].
    #[arg(long, value_name = "BOOL", num_args = 0..=1, default_missing_value = "true")]
    include_passive: Option<bool>,
    /// Node metric averaged into the clustering matrix: `clustering` or
    /// `cohort_clustering` (within-cohort subgraph) [default: clustering].
    #[arg(long, value_name = "NAME")]
    clustering_metric: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ClassifyArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Classifier thresholds (TOML or JSON).
    #[arg(long, value_name = "PATH")]
    thresholds: Option<PathBuf>,
    /// Formation window such as `1..20`; detected from the incomer curve
    /// when absent.
    #[arg(long, value_name = "RANGE")]
    formation_window: Option<PeriodRange>,
    /// Classify from the files an earlier `analyze` wrote to DIR instead of
    /// reading inputs.
    #[arg(long, value_name = "DIR", conflicts_with = "inputs")]
    from_analysis: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GenerateArgs {
    /// activist_core, opportunist or waves.
    #[arg(long)]
    regime: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, short = 'o', default_value = "data")]
    out: PathBuf,
    /// Generator spec file (TOML or JSON); flags take precedence.
    #[arg(long, value_name = "PATH")]
    spec: Option<PathBuf>,
    #[arg(long)]
    periods: Option<usize>,
    #[arg(long)]
    core_size: Option<usize>,
    /// Newcomers in period 1 of the geometric schedule.
    #[arg(long)]
    incomers_initial: Option<f64>,
    /// Per-period decay of the geometric schedule.
    #[arg(long)]
    incomers_decay: Option<f64>,
    #[arg(long)]
    p_retweet_core: Option<f64>,
    #[arg(long)]
    takeover_period: Option<usize>,
    #[arg(long)]
    chatter_rate: Option<f64>,
    #[arg(long)]
    return_rate: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Stats(args) => commands::stats(&args),
        Command::Analyze(args) => commands::analyze(&args.run),
        Command::Classify(args) => commands::classify(&args),
        Command::Generate(args) => commands::generate(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
